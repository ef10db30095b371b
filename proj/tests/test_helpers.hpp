#pragma once

#include <random>

#include "lazysdp/linalg.hpp"
#include "lazysdp/model.hpp"

namespace testutil {

using lazysdp::Matrix;
using lazysdp::SymMatrix;
using lazysdp::Vector;

using Rng = std::mt19937;

inline Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Matrix m(rows, cols);
    for (double& v : m.data) v = dist(rng);
    return m;
}

inline SymMatrix random_symmetric(Rng& rng, int n, double scale = 1.0) {
    return SymMatrix::symmetrized(random_matrix(rng, n, n, scale));
}

// A^T A + I, comfortably positive definite.
inline SymMatrix random_spd(Rng& rng, int n, double scale = 1.0) {
    Matrix a = random_matrix(rng, n, n, scale);
    return SymMatrix::symmetrized(lazysdp::transpose(a) * a + Matrix::identity(n));
}

inline Vector random_vector(Rng& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Vector v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

inline double rel_fro_diff(const Matrix& a, const Matrix& b) {
    return lazysdp::frobenius_norm(a - b) / std::max(1e-30, lazysdp::frobenius_norm(b));
}

inline double abs_fro_diff(const Matrix& a, const Matrix& b) {
    return lazysdp::frobenius_norm(a - b);
}

// Random instance with a known strictly feasible primal X0 (b_i = <A_i, X0>)
// and A_1 = I so the trace pin makes R = b_1 a valid diameter bound.
struct FeasibleInstance {
    lazysdp::SdpInstance inst;
    SymMatrix X0;
    double R = 0.0;  // valid diameter bound
    double L = 0.0;  // ||C||_2
};

inline FeasibleInstance random_feasible_instance(Rng& rng, int n, int m, double c_scale = 1.0) {
    FeasibleInstance out;
    out.inst.n = n;
    out.inst.m = m;
    out.inst.C = random_symmetric(rng, n, c_scale);
    out.X0 = random_spd(rng, n, 0.5);
    out.inst.A.push_back(SymMatrix::identity(n));
    for (int i = 1; i < m; ++i) out.inst.A.push_back(random_symmetric(rng, n));
    out.inst.b.resize(m);
    for (int i = 0; i < m; ++i) out.inst.b[i] = lazysdp::matrix_inner(out.inst.A[i], out.X0);
    out.R = out.inst.b[0];  // tr X = b_1 bounds ||X||_2 for PSD X
    out.L = lazysdp::spectral_norm_sym(out.inst.C);
    return out;
}

}  // namespace testutil
