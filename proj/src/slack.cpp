#include "lazysdp/slack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lazysdp {

ApproxSlackState make_slack_state(const SymMatrix& s) {
    PdRoots roots = pd_roots(s, "make_slack_state");
    ApproxSlackState st;
    st.S_tilde = s;
    st.S_tilde_inv = std::move(roots.inv);
    st.S_tilde_inv_sqrt = std::move(roots.inv_sqrt);
    return st;
}

LowRankUpdate low_rank_slack_update(const SymMatrix& s_new, const ApproxSlackState& state) {
    return low_rank_slack_update(pd_roots(s_new, "low_rank_slack_update"), state);
}

LowRankUpdate low_rank_slack_update(const PdRoots& s_new_roots, const ApproxSlackState& state) {
    const int n = state.S_tilde.dim();
    const SymMatrix z_mid = SymMatrix::symmetrized(
        s_new_roots.inv_sqrt.m * state.S_tilde.m * s_new_roots.inv_sqrt.m - Matrix::identity(n));
    const SpectralDecomp dec = sym_eig(z_mid);

    LowRankUpdate upd;
    upd.lambda_mid = dec.lambda;

    // Sort by |lambda| descending; ties broken by original index for
    // reproducible traces.
    std::vector<int> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    std::stable_sort(pi.begin(), pi.end(), [&](int a, int b) {
        return std::fabs(dec.lambda[a]) > std::fabs(dec.lambda[b]);
    });

    const double eps_s = state.eps_S;
    if (std::fabs(dec.lambda[pi[0]]) <= eps_s) return upd;  // r_t = 0

    const double log_n = std::max(std::log(static_cast<double>(n)), 2.0);
    const double decay = 1.0 - 1.0 / log_n;
    int r = 1;
    while (2 * r <= n && (std::fabs(dec.lambda[pi[2 * r - 1]]) > eps_s ||
                          std::fabs(dec.lambda[pi[2 * r - 1]]) >
                              decay * std::fabs(dec.lambda[pi[r - 1]]))) {
        ++r;
    }
    const int zero_count = std::min(2 * r, n);

    // L = supp(lambda_new - lambda): zeroed positions whose eigenvalue was nonzero.
    std::vector<int> support;
    support.reserve(zero_count);
    for (int k = 0; k < zero_count; ++k)
        if (dec.lambda[pi[k]] != 0.0) support.push_back(pi[k]);

    const int r_t = static_cast<int>(support.size());
    const Matrix w = s_new_roots.sqrt.m * dec.U;  // S_new^(1/2) U
    upd.V1 = Matrix(n, r_t);
    upd.V2 = Matrix(n, r_t);
    for (int c = 0; c < r_t; ++c) {
        const int col = support[c];
        const double neg_lambda = -dec.lambda[col];
        for (int i = 0; i < n; ++i) {
            upd.V1(i, c) = neg_lambda * w(i, col);
            upd.V2(i, c) = w(i, col);
        }
    }
    upd.r_t = r_t;
    return upd;
}

namespace {
constexpr double kInnerCondLimit = 1e12;

void rebuild_direct(ApproxSlackState& state) {
    PdRoots roots = pd_roots(state.S_tilde, "slack rebuild");
    state.S_tilde_inv = std::move(roots.inv);
    state.S_tilde_inv_sqrt = std::move(roots.inv_sqrt);
}
}  // namespace

SlackWoodburyFactors apply_update(ApproxSlackState& state, const LowRankUpdate& upd) {
    SlackWoodburyFactors out;
    if (upd.r_t == 0) return out;

    const Matrix inv_old = state.S_tilde_inv.m;
    state.S_tilde = SymMatrix::symmetrized(state.S_tilde.m + upd.V1 * transpose(upd.V2));

    const Matrix p = inv_old * upd.V1;  // n x r
    const Matrix q = transpose(upd.V2) * p;
    const Matrix inner = Matrix::identity(upd.r_t) + q;
    // Near-singularity is judged against the input scale 1 + ||V2^T S~^-1 V1||,
    // not kappa(inner), which stays 1 for a vanishing 1 x 1 system.
    double cond = 0.0;
    Matrix inner_inv;
    bool singular = false;
    try {
        inner_inv = lu_inverse(inner, &cond);
    } catch (const SingularUpdate&) {
        singular = true;
    }
    const double scaled_cond = singular ? std::numeric_limits<double>::infinity()
                                        : (1.0 + norm1(q)) * norm1(inner_inv);
    if (singular || !(std::max(cond, scaled_cond) < kInnerCondLimit)) {
        out.fallback_used = true;
        rebuild_direct(state);
        return out;
    }

    out.V3 = -1.0 * (p * inner_inv);
    out.V4 = inv_old * upd.V2;
    state.S_tilde_inv = SymMatrix::symmetrized(inv_old + out.V3 * transpose(out.V4));
    state.S_tilde_inv_sqrt = psd_inv_sqrt(state.S_tilde);
    return out;
}

void apply_update_direct(ApproxSlackState& state, const LowRankUpdate& upd) {
    if (upd.r_t == 0) return;
    state.S_tilde = SymMatrix::symmetrized(state.S_tilde.m + upd.V1 * transpose(upd.V2));
    rebuild_direct(state);
}

}  // namespace lazysdp
