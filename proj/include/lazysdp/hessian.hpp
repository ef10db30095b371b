#pragma once

#include "lazysdp/model.hpp"
#include "lazysdp/slack.hpp"

namespace lazysdp {

// Maintains G = (A (S_tilde^-1 kron S_tilde^-1) A^T)^-1 across slack updates.
struct HessianInverseState {
    SymMatrix G;                  // m x m
    StackedConstraints A_stacked;
    int last_rank = 0;
    bool fallback_used = false;   // last update fell back to a direct rebuild
};

// Direct inversion of the Gram matrix H_tilde(jk) = tr[S~^-1 A_j S~^-1 A_k].
// Throws RankDeficient when the Gram matrix is numerically singular.
HessianInverseState init_inverse(const StackedConstraints& a_stacked,
                                 const ApproxSlackState& slack);

// Kronecker factor blocks for the rank-(2nr + r^2) Hessian correction:
//   Y1 = [S~^-1/2 kron V3, V3 kron S~^-1/2, V3 kron V3]  (and Y2 with V4),
// built against the *pre-update* S_tilde^(-1/2); satisfies
//   (S~^-1 + V3 V4^T) kron (S~^-1 + V3 V4^T) = S~^-1 kron S~^-1 + Y1 Y2^T.
struct YFactors {
    Matrix Y1;  // n^2 x (2 n r + r^2)
    Matrix Y2;
};
YFactors build_Y_factors(const SymMatrix& s_tilde_inv_sqrt_before, const Matrix& v3,
                         const Matrix& v4);

// Woodbury step G <- G - G A Y1 (I + Y2^T A^T G A Y1)^-1 Y2^T A^T G, in the
// order: A Y1 and A Y2 first, then the inner system, then the outer products.
// A near-singular inner system falls back to init_inverse against slack_new
// and flags the state.
void update_inverse(HessianInverseState& state, const YFactors& y,
                    const ApproxSlackState& slack_new);

// Flop-estimate crossover: the Woodbury route pays (2nr + r^2)^3/3 for the
// inner system, which at large update rank dwarfs a direct m x m rebuild.
// True when the update should go through update_inverse rather than a
// rebuild; always true at small update rank when m >= n^2.
bool woodbury_worthwhile(int m, int n, int r_t);

// Exact Hessian at an exact PD slack, computed by the double-trace loop and
// cross-checked against the Kronecker route to 1e-9 relative.
SymMatrix hessian_exact(const StackedConstraints& a_stacked, const SymMatrix& s);

// Trace-route Gram matrix H(jk) = tr[S_inv A_j S_inv A_k] for a given inverse.
SymMatrix gram_from_inverse(const StackedConstraints& a_stacked, const SymMatrix& s_inv);

}  // namespace lazysdp
