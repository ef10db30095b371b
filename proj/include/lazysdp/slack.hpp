#pragma once

#include "lazysdp/linalg.hpp"

namespace lazysdp {

// Lazily maintained approximate slack with its cached inverse and inverse
// square root. Invariant against the exact slack S of the same iterate:
// all eigenvalues of S^(-1/2) S_tilde S^(-1/2) lie in [1/1.011, 1.011].
struct ApproxSlackState {
    SymMatrix S_tilde;
    SymMatrix S_tilde_inv;
    SymMatrix S_tilde_inv_sqrt;
    double eps_S = 0.01;  // spectral approximation constant
};

ApproxSlackState make_slack_state(const SymMatrix& s);

// Rank-r_t correction S_tilde_new = S_tilde + V1 V2^T produced by the
// eigenvalue-thresholded update. r_t = 0 means no update was needed.
struct LowRankUpdate {
    Matrix V1;          // n x r_t
    Matrix V2;          // n x r_t
    int r_t = 0;
    Vector lambda_mid;  // spectrum of Z_mid (ascending), kept for diagnostics
};

// Decides the update from Z_mid = S_new^(-1/2) S_tilde S_new^(-1/2) - I:
// sorts |eigenvalues| descending, grows r while the tail is still above eps_S
// or decays slower than (1 - 1/log n), then zeroes the 2r leading entries.
// Throws NotPositiveDefinite when S_new is not PD.
LowRankUpdate low_rank_slack_update(const SymMatrix& s_new, const ApproxSlackState& state);

// Same, reusing an existing eigendecomposition of S_new.
LowRankUpdate low_rank_slack_update(const PdRoots& s_new_roots, const ApproxSlackState& state);

// Woodbury factors for the inverse update S_tilde_inv_new = S_tilde_inv + V3 V4^T,
// handed to the Hessian maintainer. When the inner system is near singular the
// state is rebuilt directly instead and fallback_used is set (V3/V4 empty).
struct SlackWoodburyFactors {
    Matrix V3;  // n x r_t
    Matrix V4;  // n x r_t
    bool fallback_used = false;
};

// Applies the update in place: S_tilde via V1 V2^T, S_tilde_inv via Woodbury,
// S_tilde_inv_sqrt recomputed from a fresh eigendecomposition.
SlackWoodburyFactors apply_update(ApproxSlackState& state, const LowRankUpdate& upd);

// Reference path: all cached quantities recomputed directly (naive variant).
void apply_update_direct(ApproxSlackState& state, const LowRankUpdate& upd);

}  // namespace lazysdp
