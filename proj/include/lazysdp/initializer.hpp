#pragma once

#include "lazysdp/model.hpp"

namespace lazysdp {

// The (n+2)-dimensional, (m+1)-constraint reformulation with a known strictly
// feasible primal/dual pair. Solving it to duality gap <= delta^2 yields an
// approximate solution of the original instance by extract_solution.
struct InitializedProblem {
    SdpInstance modified;  // dimension n+2, m+1 constraints
    double R = 0.0;        // diameter bound of the original instance
    double L = 0.0;        // objective Lipschitz bound, L >= ||C||_2
    double delta = 0.0;    // accuracy parameter in (0, 1]
    Vector y0;             // initial dual, [0_m; 1]
    SymMatrix S0;          // initial slack, block-diag(I_n - C*delta/L, 1, 1)
    SymMatrix X0;          // initial primal, I_(n+2)
};

// Builds the modified instance. Requires R > 0, 0 < delta <= 1 and
// L >= ||C||_2; throws InfeasibleInitialization when I - C*delta/L fails to be
// positive definite (only possible at delta*||C||_2 = L).
InitializedProblem build_modified(const SdpInstance& inst, double R, double L, double delta);

// Maps a modified-problem solution back to the original instance:
// X_hat = R * (top-left n x n block). Records <C, X_hat>, the accumulated
// constraint residual and the PSD violation; keeps the modified problem's
// duality gap as the recorded gap. Throws NotConverged when that gap exceeds
// delta^2.
Solution extract_solution(const SdpInstance& original, const Solution& modified_sol, double R,
                          double delta);

// Same extraction without the gap gate, for reporting best iterates.
Solution extract_solution_unchecked(const SdpInstance& original, const Solution& modified_sol,
                                    double R);

}  // namespace lazysdp
