#include "lazysdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace lazysdp {

namespace {
thread_local OpCounters g_counters;
}

OpCounters& op_counters() { return g_counters; }
void reset_op_counters() { g_counters = OpCounters{}; }

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.data[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= b.data[i];
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.data) v *= s;
    return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    const int n = a.rows, k = a.cols, m = b.cols;
    for (int j = 0; j < m; ++j) {
        double* ccol = &c.data[static_cast<std::size_t>(j) * n];
        for (int l = 0; l < k; ++l) {
            const double s = b(l, j);
            if (s == 0.0) continue;
            const double* acol = &a.data[static_cast<std::size_t>(l) * n];
            for (int i = 0; i < n; ++i) ccol[i] += s * acol[i];
        }
    }
    g_counters.matmul_flops += 2ull * n * k * m;
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (int j = 0; j < a.cols; ++j)
        for (int i = 0; i < a.rows; ++i) t(j, i) = a(i, j);
    return t;
}

Matrix hcat(std::initializer_list<const Matrix*> blocks) {
    int rows = 0, cols = 0;
    for (const Matrix* b : blocks) {
        if (b->empty()) continue;
        rows = b->rows;
        cols += b->cols;
    }
    Matrix out(rows, cols);
    std::size_t off = 0;
    for (const Matrix* b : blocks) {
        if (b->empty()) continue;
        std::memcpy(out.data.data() + off, b->data.data(), b->data.size() * sizeof(double));
        off += b->data.size();
    }
    return out;
}

Vector mat_vec(const Matrix& a, const Vector& x) {
    Vector y(a.rows, 0.0);
    for (int j = 0; j < a.cols; ++j) {
        const double s = x[j];
        if (s == 0.0) continue;
        const double* acol = &a.data[static_cast<std::size_t>(j) * a.rows];
        for (int i = 0; i < a.rows; ++i) y[i] += s * acol[i];
    }
    g_counters.matmul_flops += 2ull * a.rows * a.cols;
    return y;
}

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

double max_abs(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data) s = std::max(s, std::fabs(v));
    return s;
}

Vector vec(const Matrix& m) { return m.data; }

Matrix unvec(const Vector& v, int rows, int cols) {
    Matrix m(rows, cols);
    m.data = v;
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows * b.rows, a.cols * b.cols);
    for (int j = 0; j < a.cols; ++j)
        for (int i = 0; i < a.rows; ++i) {
            const double s = a(i, j);
            const int r0 = i * b.rows, c0 = j * b.cols;
            for (int q = 0; q < b.cols; ++q) {
                const double* bcol = &b.data[static_cast<std::size_t>(q) * b.rows];
                double* ccol = &c.data[static_cast<std::size_t>(c0 + q) * c.rows + r0];
                for (int p = 0; p < b.rows; ++p) ccol[p] = s * bcol[p];
            }
        }
    g_counters.kron_entries += c.data.size();
    return c;
}

double symmetry_defect(const Matrix& m) {
    double d = 0.0;
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < j; ++i) d = std::max(d, std::fabs(m(i, j) - m(j, i)));
    return d;
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix{Matrix::identity(n)}; }
SymMatrix SymMatrix::zero(int n) { return SymMatrix{Matrix(n, n)}; }

SymMatrix SymMatrix::require(Matrix m, double tol_scale) {
    if (m.rows != m.cols) throw NumericError("SymMatrix: matrix is not square");
    if (!m.all_finite()) throw NumericError("SymMatrix: entries are not finite");
    const double defect = symmetry_defect(m);
    const double scale = std::max(1.0, frobenius_norm(m));
    if (defect > tol_scale * scale)
        throw NumericError("SymMatrix: symmetry defect " + std::to_string(defect) +
                           " exceeds tolerance");
    return symmetrized(std::move(m));
}

SymMatrix SymMatrix::symmetrized(Matrix m) {
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < j; ++i) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
    return SymMatrix{std::move(m)};
}

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form, with the
// accumulated transform left in z (columns end up as eigenvectors after ql).
void tridiagonalize(int n, std::vector<double>& zbuf, Vector& d, Vector& e) {
    auto z = [&](int i, int j) -> double& { return zbuf[static_cast<std::size_t>(j) * n + i]; };

    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    const double g2 = e[j] - hh * f;
                    e[j] = g2;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g2 * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of z along.
// Deflates when the off-diagonal drops below 1e-12 relative to its neighbours.
void ql_implicit(int n, Vector& d, Vector& e, std::vector<double>& zbuf) {
    auto z = [&](int i, int j) -> double& { return zbuf[static_cast<std::size_t>(j) * n + i]; };
    constexpr double kRelTol = 1e-12;
    constexpr int kMaxSweeps = 50;

    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= kRelTol * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxSweeps)
                    throw EigenFailure("sym_eig: QL failed to deflate eigenvalue " +
                                       std::to_string(l) + " of " + std::to_string(n) +
                                       " after " + std::to_string(kMaxSweeps) +
                                       " sweeps; residual off-diagonal " + std::to_string(e[l]));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

SpectralDecomp sym_eig(const SymMatrix& m) {
    const int n = m.dim();
    SpectralDecomp out;
    out.U = m.m;
    out.lambda.assign(n, 0.0);
    if (n == 0) return out;
    Vector e(n, 0.0);
    if (n == 1) {
        out.lambda[0] = m(0, 0);
        out.U = Matrix::identity(1);
        g_counters.eig_calls += 1;
        return out;
    }
    tridiagonalize(n, out.U.data, out.lambda, e);
    ql_implicit(n, out.lambda, e, out.U.data);
    g_counters.eig_calls += 1;
    g_counters.matmul_flops += 10ull * n * n * n;  // rough tally for the eig sweep work

    // Ascending eigenvalue order, stable on ties for reproducible traces.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return out.lambda[a] < out.lambda[b]; });
    Matrix u_sorted(n, n);
    Vector lam_sorted(n);
    for (int j = 0; j < n; ++j) {
        lam_sorted[j] = out.lambda[idx[j]];
        std::memcpy(&u_sorted.data[static_cast<std::size_t>(j) * n],
                    &out.U.data[static_cast<std::size_t>(idx[j]) * n], sizeof(double) * n);
    }
    out.U = std::move(u_sorted);
    out.lambda = std::move(lam_sorted);
    return out;
}

SymMatrix psd_sqrt(const SymMatrix& m) {
    const SpectralDecomp d = sym_eig(m);
    const double lmin = d.lambda.empty() ? 1.0 : d.lambda.front();
    if (lmin <= 0.0) throw NotPositiveDefinite(lmin, "psd_sqrt");
    return spectral_map(d, [](double x) { return std::sqrt(x); });
}

SymMatrix psd_inv_sqrt(const SymMatrix& m) {
    const SpectralDecomp d = sym_eig(m);
    const double lmin = d.lambda.empty() ? 1.0 : d.lambda.front();
    if (lmin <= 0.0) throw NotPositiveDefinite(lmin, "psd_inv_sqrt");
    return spectral_map(d, [](double x) { return 1.0 / std::sqrt(x); });
}

PdRoots pd_roots(const SymMatrix& m, const char* where) {
    const SpectralDecomp d = sym_eig(m);
    const double lmin = d.lambda.empty() ? 1.0 : d.lambda.front();
    if (lmin <= 0.0) throw NotPositiveDefinite(lmin, where);
    PdRoots out;
    out.sqrt = spectral_map(d, [](double x) { return std::sqrt(x); });
    out.inv_sqrt = spectral_map(d, [](double x) { return 1.0 / std::sqrt(x); });
    out.inv = spectral_map(d, [](double x) { return 1.0 / x; });
    out.lambda_min = lmin;
    out.lambda_max = d.lambda.back();
    return out;
}

LuFactor lu_factor(const Matrix& a) {
    LuFactor f;
    f.lu = a;
    const int n = a.rows;
    f.pivots.assign(n, 0);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(f.lu(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        f.pivots[k] = p;
        if (best == 0.0) {
            f.singular = true;
            continue;
        }
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
        const double pivot = f.lu(k, k);
        for (int i = k + 1; i < n; ++i) f.lu(i, k) /= pivot;
        for (int j = k + 1; j < n; ++j) {
            const double s = f.lu(k, j);
            if (s == 0.0) continue;
            for (int i = k + 1; i < n; ++i) f.lu(i, j) -= f.lu(i, k) * s;
        }
    }
    g_counters.lu_factorizations += 1;
    g_counters.matmul_flops += (2ull * n * n * n) / 3;
    return f;
}

Vector LuFactor::solve(const Vector& b) const {
    const int n = lu.rows;
    Vector x = b;
    // Row interchanges are recorded against the whole row, so they must all be
    // applied before the triangular sweeps.
    for (int k = 0; k < n; ++k) std::swap(x[k], x[pivots[k]]);
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) x[i] -= lu(i, k) * x[k];
    for (int k = n - 1; k >= 0; --k) {
        for (int j = k + 1; j < n; ++j) x[k] -= lu(k, j) * x[j];
        x[k] /= lu(k, k);
    }
    return x;
}

Matrix LuFactor::solve(const Matrix& b) const {
    Matrix x(b.rows, b.cols);
    for (int j = 0; j < b.cols; ++j) {
        Vector col(b.rows);
        std::memcpy(col.data(), &b.data[static_cast<std::size_t>(j) * b.rows],
                    sizeof(double) * b.rows);
        Vector sol = solve(col);
        std::memcpy(&x.data[static_cast<std::size_t>(j) * b.rows], sol.data(),
                    sizeof(double) * b.rows);
    }
    return x;
}

Matrix LuFactor::inverse() const { return solve(Matrix::identity(lu.rows)); }

double norm1(const Matrix& a) {
    double best = 0.0;
    for (int j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows; ++i) s += std::fabs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

Matrix lu_inverse(const Matrix& a, double* cond_out) {
    const LuFactor f = lu_factor(a);
    if (f.singular) {
        if (cond_out) {
            *cond_out = std::numeric_limits<double>::infinity();
            return Matrix(a.rows, a.rows);
        }
        throw SingularUpdate(std::numeric_limits<double>::infinity(), "lu_inverse");
    }
    Matrix inv = f.inverse();
    if (cond_out) *cond_out = norm1(a) * norm1(inv);
    return inv;
}

Matrix woodbury_update(const Matrix& minv, const Matrix& u, const Matrix& cmat,
                       const Matrix& v) {
    const int k = u.cols;
    if (k == 0) return minv;
    double cond_c = 0.0;
    Matrix cinv = lu_inverse(cmat, &cond_c);
    if (!(cond_c < 1e14)) throw SingularUpdate(cond_c, "woodbury_update (C block)");
    const Matrix p = minv * u;       // n x k
    const Matrix q = v * minv;       // k x n
    const Matrix inner = cinv + v * p;
    double cond_inner = 0.0;
    const Matrix x = lu_inverse(inner, &cond_inner);
    if (!(cond_inner < 1e14)) throw SingularUpdate(cond_inner, "woodbury_update");
    return minv - p * (x * q);
}

double trace_product(const SymMatrix& s_inv, const SymMatrix& a) {
    double s = 0.0;
    const std::size_t len = s_inv.m.data.size();
    for (std::size_t i = 0; i < len; ++i) s += s_inv.m.data[i] * a.m.data[i];
    g_counters.matmul_flops += 2ull * len;
    return s;
}

double schatten1_norm(const SymMatrix& a) {
    const SpectralDecomp d = sym_eig(a);
    double s = 0.0;
    for (double l : d.lambda) s += std::fabs(l);
    return s;
}

double spectral_norm_sym(const SymMatrix& a) {
    const SpectralDecomp d = sym_eig(a);
    double s = 0.0;
    for (double l : d.lambda) s = std::max(s, std::fabs(l));
    return s;
}

}  // namespace lazysdp
