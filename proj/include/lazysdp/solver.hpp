#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "lazysdp/diagnostics.hpp"
#include "lazysdp/hessian.hpp"
#include "lazysdp/initializer.hpp"
#include "lazysdp/model.hpp"
#include "lazysdp/slack.hpp"

namespace lazysdp {

// Dual iterate: y, barrier parameter, exact slack and its direct inverse.
struct DualState {
    Vector y;
    double eta = 0.0;
    SymMatrix S;
    SymMatrix S_inv;
};

enum class Variant { maintained, naive };
enum class CheckLevel { off, cheap, full };

struct SolverConfig {
    double eps = 1e-4;          // target accuracy, in (0, 0.01]
    double eps_newton = 0.1;    // Newton step size, in (sqrt(eps), 0.1]
    int max_iters = 0;          // 0 = the (40/eps_N) sqrt(n) log(n/eps) budget
    Variant variant = Variant::maintained;
    CheckLevel check_level = CheckLevel::cheap;
    std::string trace_path;     // empty = no trace file
};

// Throws std::invalid_argument when the eps / eps_newton ranges are violated.
void validate_config(const SolverConfig& cfg);

// Per-iteration record; optional fields are filled according to check_level.
struct IterationRecord {
    int t = 0;
    double eta = 0.0;
    int r_t = 0;
    std::optional<double> newton_measure;   // full only, against the exact Hessian
    std::optional<double> slack_drift_fro;  // ||S^-1/2 S_new S^-1/2 - I||_F
    std::optional<double> sandwich_min;     // eigen range of S_new^-1/2 S~_new S_new^-1/2
    std::optional<double> sandwich_max;
    std::optional<double> g_fidelity;       // ||G H~ - I||_F, H~ rebuilt from current S~
    bool slack_fallback = false;
    bool hessian_fallback = false;
    double wall_time_us = 0.0;
    OpCounters ops;  // deltas for this iteration
};

Vector gradient(const DualState& state, const SdpInstance& inst, double eta_new);
Vector newton_step(const HessianInverseState& g, const Vector& grad);

// Exact slack for a dual vector: sum_i y_i A_i - C.
SymMatrix slack_matrix(const SdpInstance& inst, const Vector& y);

// g_eta(y)^T H(y)^-1 g_eta(y) with H the exact Hessian at y.
double newton_measure_exact(const SdpInstance& inst, const StackedConstraints& a_stacked,
                            const Vector& y, double eta);

// One instance of the barrier iteration (normally run on the initializer's
// modified problem). Exposed so variants can be stepped side by side.
class BarrierSolver {
  public:
    BarrierSolver(SdpInstance inst, Vector y0, double eta0, SolverConfig cfg);

    IterationRecord step();

    const DualState& state() const { return state_; }
    const SdpInstance& instance() const { return inst_; }
    const ApproxSlackState& slack() const { return slack_; }
    const HessianInverseState& hessian() const { return hess_; }
    const StackedConstraints& stacked() const { return stacked_; }
    int iteration() const { return t_; }
    std::optional<double> initial_newton_measure() const { return initial_measure_; }
    const PotentialAuditor* auditor() const { return auditor_.get(); }

  private:
    SdpInstance inst_;
    SolverConfig cfg_;
    StackedConstraints stacked_;
    DualState state_;
    ApproxSlackState slack_;
    HessianInverseState hess_;
    SymMatrix prev_inv_sqrt_;  // S^(-1/2) of the current exact slack
    int t_ = 0;
    std::optional<double> initial_measure_;
    std::unique_ptr<PotentialAuditor> auditor_;
};

struct SolveStats {
    bool converged = false;
    int iterations = 0;
    int max_rank = 0;
    double final_eta = 0.0;
    double eta_threshold = 0.0;
    double delta = 0.0;
    double gap = 0.0;             // recorded modified-problem duality gap
    double dual_objective = 0.0;  // b_bar^T y at exit
    std::optional<double> initial_newton_measure;
    int assumption_violations = 0;
    int s_move_failures = 0;
    int stilde_move_failures = 0;
    double telescoping_error = 0.0;
    std::optional<AmortizationReport> amortization;
};

struct SolveResult {
    Solution solution;           // extracted answer for the original instance
    Solution modified_solution;  // final iterate of the modified problem
    InitializedProblem init;
    SolveStats stats;
    std::vector<IterationRecord> records;
    std::vector<LemmaCheckRecord> lemma_checks;
};

using IterationObserver = std::function<void(const DualState&, const IterationRecord&)>;

// Full driver: builds the modified problem with delta = eps, starts from its
// feasible pair, iterates until eta >= (n+2)(1 + 2 eps_N)/eps^2 or the budget
// runs out, reconstructs the primal as (1/eta) S^-1 and extracts. A run that
// misses the gap target returns converged = false with the best iterate.
SolveResult solve(const SdpInstance& inst, double R, double L, const SolverConfig& cfg,
                  const IterationObserver& observer = {});

}  // namespace lazysdp
