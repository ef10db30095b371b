#include "lazysdp/hessian.hpp"

#include <cmath>

namespace lazysdp {

SymMatrix gram_from_inverse(const StackedConstraints& a_stacked, const SymMatrix& s_inv) {
    const int m = a_stacked.rows();
    const int n = s_inv.dim();
    // W_j = S_inv A_j S_inv, then H(j,k) = <W_j, A_k>.
    Matrix h(m, m);
    Matrix aj(n, n);
    for (int j = 0; j < m; ++j) {
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < n; ++r) aj(r, c) = a_stacked.A(j, c * n + r);
        const Matrix w = s_inv.m * aj * s_inv.m;
        const Vector wv = vec(w);
        for (int k = 0; k < m; ++k) {
            double acc = 0.0;
            for (int t = 0; t < n * n; ++t) acc += a_stacked.A(k, t) * wv[t];
            h(j, k) = acc;
        }
    }
    op_counters().matmul_flops += 2ull * m * m * n * n;
    return SymMatrix::symmetrized(std::move(h));
}

HessianInverseState init_inverse(const StackedConstraints& a_stacked,
                                 const ApproxSlackState& slack) {
    HessianInverseState st;
    st.A_stacked = a_stacked;
    const SymMatrix gram = gram_from_inverse(a_stacked, slack.S_tilde_inv);
    double cond = 0.0;
    Matrix g;
    try {
        g = lu_inverse(gram.m, &cond);
    } catch (const SingularUpdate&) {
        throw RankDeficient("init_inverse: Gram matrix is singular; stacked constraints are rank deficient");
    }
    if (!std::isfinite(cond))
        throw RankDeficient("init_inverse: Gram matrix is singular; stacked constraints are rank deficient");
    st.G = SymMatrix::symmetrized(std::move(g));
    return st;
}

YFactors build_Y_factors(const SymMatrix& s_tilde_inv_sqrt_before, const Matrix& v3,
                         const Matrix& v4) {
    YFactors y;
    if (v3.cols == 0) return y;  // empty update leaves the Kronecker square unchanged
    const Matrix& r = s_tilde_inv_sqrt_before.m;
    const Matrix b1 = kron(r, v3);
    const Matrix b2 = kron(v3, r);
    const Matrix b3 = kron(v3, v3);
    y.Y1 = hcat({&b1, &b2, &b3});
    const Matrix c1 = kron(r, v4);
    const Matrix c2 = kron(v4, r);
    const Matrix c3 = kron(v4, v4);
    y.Y2 = hcat({&c1, &c2, &c3});
    return y;
}

void update_inverse(HessianInverseState& state, const YFactors& y,
                    const ApproxSlackState& slack_new) {
    state.fallback_used = false;
    if (y.Y1.cols == 0) {
        state.last_rank = 0;
        return;
    }
    const Matrix ay1 = state.A_stacked.A * y.Y1;  // m x K
    const Matrix ay2 = state.A_stacked.A * y.Y2;
    const int big_k = ay1.cols;

    const Matrix ga1 = state.G.m * ay1;  // m x K
    const Matrix ga2 = state.G.m * ay2;

    // Woodbury inner system I + Y2^T A^T G A Y1; the maintained inverse sits
    // in the middle factor.
    const Matrix cross = transpose(ay2) * ga1;
    const Matrix inner = Matrix::identity(big_k) + cross;
    double cond = 0.0;
    Matrix inner_inv;
    bool singular = false;
    try {
        inner_inv = lu_inverse(inner, &cond);
    } catch (const SingularUpdate&) {
        singular = true;
    }
    const double scaled_cond = singular ? cond : (1.0 + norm1(cross)) * norm1(inner_inv);
    if (singular || !(std::max(cond, scaled_cond) < 1e12)) {
        HessianInverseState fresh = init_inverse(state.A_stacked, slack_new);
        state.G = std::move(fresh.G);
        state.fallback_used = true;
        return;
    }

    state.G = SymMatrix::symmetrized(state.G.m - ga1 * (inner_inv * transpose(ga2)));
}

bool woodbury_worthwhile(int m, int n, int r_t) {
    if (r_t == 0) return true;  // no-op either way
    const double k = 2.0 * n * r_t + static_cast<double>(r_t) * r_t;
    const double mm = m, nn = n;
    const double woodbury = k * k * k / 3.0 + 2.0 * mm * nn * nn * k + 2.0 * mm * mm * k;
    const double direct = 4.0 * mm * nn * nn * nn + mm * mm * nn * nn + mm * mm * mm;
    return woodbury <= 10.0 * direct;
}

SymMatrix hessian_exact(const StackedConstraints& a_stacked, const SymMatrix& s) {
    const PdRoots roots = pd_roots(s, "hessian_exact");
    const SymMatrix h_trace = gram_from_inverse(a_stacked, roots.inv);

    // Independent Kronecker route: A (S^-1 kron S^-1) A^T.
    const Matrix kk = kron(roots.inv.m, roots.inv.m);
    const Matrix h_kron = a_stacked.A * kk * transpose(a_stacked.A);
    const double rel = frobenius_norm(h_trace.m - h_kron) /
                       std::max(1e-30, frobenius_norm(h_kron));
    if (rel > 1e-9)
        throw NumericError("hessian_exact: trace and Kronecker routes disagree (rel " +
                           std::to_string(rel) + ")");
    return h_trace;
}

}  // namespace lazysdp
