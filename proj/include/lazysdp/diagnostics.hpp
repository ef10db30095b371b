#pragma once

#include <string>
#include <vector>

#include "lazysdp/linalg.hpp"

namespace lazysdp {

// Non-increasing positive weight vector for the rank potential.
struct PotentialWeights {
    Vector g;
    std::string label;

    static PotentialWeights inv_sqrt(int n);  // g_i = 1/sqrt(i)
    static PotentialWeights custom(Vector g, std::string label);
    double norm2() const;
    int dim() const { return static_cast<int>(g.size()); }
};

// Phi_g(Z) = sum_i g_i * (i-th largest |eigenvalue| of Z).
double potential(const SymMatrix& z, const PotentialWeights& w);
double potential_from_eigs(Vector lambda, const PotentialWeights& w);

// Z, Z_mid, Z_new of one iteration, each built from fresh eigendecompositions:
//   Z     = S^(-1/2)      S_tilde      S^(-1/2)      - I
//   Z_mid = S_new^(-1/2)  S_tilde      S_new^(-1/2)  - I
//   Z_new = S_new^(-1/2)  S_tilde_new  S_new^(-1/2)  - I
struct DifferenceMatrices {
    SymMatrix Z;
    SymMatrix Z_mid;
    SymMatrix Z_new;
};
DifferenceMatrices make_difference_matrices(const SymMatrix& s_inv_sqrt,
                                            const SymMatrix& s_new_inv_sqrt,
                                            const SymMatrix& s_tilde,
                                            const SymMatrix& s_tilde_new);

enum class CheckStatus { pass, fail, skipped };

// Outcome of one lemma check; margin is the slack in the inequality, so a
// non-negative margin is a pass.
struct MoveCheck {
    CheckStatus status = CheckStatus::skipped;
    double margin = 0.0;
};

// S move: Phi(Z_mid) - Phi(Z) <= ||g||_2 (+1e-8), valid under the closeness
// assumption; a violated assumption records skipped, not a lemma failure.
MoveCheck check_s_move(double phi_z, double phi_z_mid, const PotentialWeights& w,
                       bool assumption_ok);

// S_tilde move: Phi(Z_mid) - Phi(Z_new) >= (eps_S / (10 log n)) r_t g_{r_t} - 1e-8,
// with eps_S = 0.01 and log n = max(ln n, 2) as in the slack maintainer.
MoveCheck check_stilde_move(double phi_z_mid, double phi_z_new, int r_t,
                            const PotentialWeights& w, int n);

struct AmortizationReport {
    int T = 0;
    std::vector<int> ranks;
    double sum_rg = 0.0;  // sum_t r_t * g_{r_t}
    double bound = 0.0;   // T * ||g||_2 * ln n
    double ratio = 0.0;
};
AmortizationReport amortization_report(const std::vector<int>& ranks, const PotentialWeights& w,
                                       int n);

// One iteration's worth of verified lemma activity.
struct LemmaCheckRecord {
    int t = 0;
    int r_t = 0;
    bool assumption_ok = false;
    double slack_drift_fro = 0.0;
    double z_norm2 = 0.0;
    double phi_z = 0.0;
    double phi_z_mid = 0.0;
    double phi_z_new = 0.0;
    double eig_displacement_sq = 0.0;  // sum_i (lambda(Z)_[i] - lambda(Z_mid)_[i])^2
    MoveCheck s_move;
    MoveCheck stilde_move;
};

// Consumes per-iteration snapshots and verifies the potential lemmas against
// fresh eigendecompositions, never against maintained quantities.
class PotentialAuditor {
  public:
    PotentialAuditor(PotentialWeights w, int n);

    // drift_fro = ||S^(-1/2) S_new S^(-1/2) - I||_F for the same iteration.
    LemmaCheckRecord observe(int t, const DifferenceMatrices& dm, int r_t, double drift_fro);

    const std::vector<LemmaCheckRecord>& records() const { return records_; }
    AmortizationReport report() const;
    int assumption_violations() const { return assumption_violations_; }
    int s_move_failures() const { return s_move_failures_; }
    int stilde_move_failures() const { return stilde_move_failures_; }
    // |(Phi(Z_new^(T)) - Phi(Z^(1))) - sum of per-iteration deltas|.
    double telescoping_error() const;

  private:
    PotentialWeights w_;
    int n_;
    std::vector<LemmaCheckRecord> records_;
    std::vector<int> ranks_;
    int assumption_violations_ = 0;
    int s_move_failures_ = 0;
    int stilde_move_failures_ = 0;
    double first_phi_z_ = 0.0;
    double last_phi_z_new_ = 0.0;
    double delta_sum_ = 0.0;
    bool any_ = false;
};

}  // namespace lazysdp
