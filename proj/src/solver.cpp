#include "lazysdp/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "lazysdp/trace.hpp"

namespace lazysdp {

void validate_config(const SolverConfig& cfg) {
    if (!(cfg.eps > 0.0 && cfg.eps <= 0.01))
        throw std::invalid_argument("eps must lie in (0, 0.01]");
    if (!(cfg.eps_newton > std::sqrt(cfg.eps) && cfg.eps_newton <= 0.1))
        throw std::invalid_argument("eps_newton must lie in (sqrt(eps), 0.1]");
    if (cfg.max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
}

SymMatrix slack_matrix(const SdpInstance& inst, const Vector& y) {
    Matrix s = -1.0 * inst.C.m;
    for (int i = 0; i < inst.m; ++i) {
        const double yi = y[i];
        if (yi == 0.0) continue;
        for (std::size_t t = 0; t < s.data.size(); ++t) s.data[t] += yi * inst.A[i].m.data[t];
    }
    return SymMatrix::symmetrized(std::move(s));
}

Vector gradient(const DualState& state, const SdpInstance& inst, double eta_new) {
    Vector g(inst.m);
    for (int j = 0; j < inst.m; ++j)
        g[j] = eta_new * inst.b[j] - trace_product(state.S_inv, inst.A[j]);
    return g;
}

Vector newton_step(const HessianInverseState& g, const Vector& grad) {
    Vector step = mat_vec(g.G.m, grad);
    for (double& v : step) v = -v;
    return step;
}

double newton_measure_exact(const SdpInstance& inst, const StackedConstraints& a_stacked,
                            const Vector& y, double eta) {
    const SymMatrix s = slack_matrix(inst, y);
    const PdRoots roots = pd_roots(s, "newton_measure_exact");
    const SymMatrix h = gram_from_inverse(a_stacked, roots.inv);
    Vector g(inst.m);
    for (int j = 0; j < inst.m; ++j) g[j] = eta * inst.b[j] - trace_product(roots.inv, inst.A[j]);
    const LuFactor f = lu_factor(h.m);
    if (f.singular) throw RankDeficient("newton_measure_exact: exact Hessian is singular");
    return dot(g, f.solve(g));
}

BarrierSolver::BarrierSolver(SdpInstance inst, Vector y0, double eta0, SolverConfig cfg)
    : inst_(std::move(inst)), cfg_(std::move(cfg)) {
    validate_config(cfg_);
    stacked_ = stack_constraints(inst_);

    state_.y = std::move(y0);
    state_.eta = eta0;
    state_.S = slack_matrix(inst_, state_.y);
    PdRoots roots;
    try {
        roots = pd_roots(state_.S, "initial slack");
    } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(e.lambda_min, "BarrierSolver: initial dual point is infeasible");
    }
    state_.S_inv = roots.inv;
    prev_inv_sqrt_ = roots.inv_sqrt;

    slack_ = make_slack_state(state_.S);
    hess_ = init_inverse(stacked_, slack_);

    if (cfg_.check_level == CheckLevel::full) {
        initial_measure_ = newton_measure_exact(inst_, stacked_, state_.y, state_.eta);
        auditor_ = std::make_unique<PotentialAuditor>(PotentialWeights::inv_sqrt(inst_.n), inst_.n);
    }
}

IterationRecord BarrierSolver::step() {
    const auto t_start = std::chrono::steady_clock::now();
    const OpCounters ops_before = op_counters();
    const int n = inst_.n;

    IterationRecord rec;
    rec.t = ++t_;

    const double eta_new = state_.eta * (1.0 + cfg_.eps_newton / (20.0 * std::sqrt(n)));
    const Vector g = gradient(state_, inst_, eta_new);
    const Vector dy = newton_step(hess_, g);
    Vector y_new = state_.y;
    for (int i = 0; i < inst_.m; ++i) y_new[i] += dy[i];

    const SymMatrix s_new = slack_matrix(inst_, y_new);
    PdRoots roots_new;
    try {
        roots_new = pd_roots(s_new, "step");
    } catch (const NotPositiveDefinite& e) {
        throw StepOutOfCone(e.lambda_min);
    }

    const LowRankUpdate upd = low_rank_slack_update(roots_new, slack_);
    rec.r_t = upd.r_t;

    // Snapshots needed after the in-place update.
    SymMatrix s_tilde_old;
    if (cfg_.check_level == CheckLevel::full) s_tilde_old = slack_.S_tilde;
    SymMatrix pre_inv_sqrt;
    if (cfg_.variant == Variant::maintained && upd.r_t > 0)
        pre_inv_sqrt = slack_.S_tilde_inv_sqrt;

    if (cfg_.variant == Variant::maintained) {
        const SlackWoodburyFactors wood = apply_update(slack_, upd);
        rec.slack_fallback = wood.fallback_used;
        if (wood.fallback_used) {
            hess_ = init_inverse(stacked_, slack_);
            rec.hessian_fallback = true;
        } else if (upd.r_t > 0) {
            if (woodbury_worthwhile(inst_.m, n, upd.r_t)) {
                const YFactors y = build_Y_factors(pre_inv_sqrt, wood.V3, wood.V4);
                update_inverse(hess_, y, slack_);
                rec.hessian_fallback = hess_.fallback_used;
            } else {
                // Inner system would dwarf an m x m rebuild; invert directly.
                hess_ = init_inverse(stacked_, slack_);
            }
        }
        hess_.last_rank = upd.r_t;
    } else {
        apply_update_direct(slack_, upd);
        hess_ = init_inverse(stacked_, slack_);
        hess_.last_rank = upd.r_t;
    }

    if (cfg_.check_level != CheckLevel::off) {
        rec.slack_drift_fro =
            frobenius_norm(prev_inv_sqrt_.m * s_new.m * prev_inv_sqrt_.m - Matrix::identity(n));

        const SymMatrix z_new = SymMatrix::symmetrized(
            roots_new.inv_sqrt.m * slack_.S_tilde.m * roots_new.inv_sqrt.m - Matrix::identity(n));
        const SpectralDecomp zd = sym_eig(z_new);
        rec.sandwich_min = 1.0 + zd.lambda.front();
        rec.sandwich_max = 1.0 + zd.lambda.back();

        // Fidelity of the maintained inverse against a Gram matrix rebuilt
        // from the current S_tilde with a fresh inverse.
        double cond = 0.0;
        const Matrix fresh_inv = lu_inverse(slack_.S_tilde.m, &cond);
        const SymMatrix h_fresh =
            gram_from_inverse(stacked_, SymMatrix::symmetrized(fresh_inv));
        rec.g_fidelity =
            frobenius_norm(hess_.G.m * h_fresh.m - Matrix::identity(inst_.m));

        if (cfg_.check_level == CheckLevel::full) {
            Vector g_post(inst_.m);
            for (int j = 0; j < inst_.m; ++j)
                g_post[j] = eta_new * inst_.b[j] - trace_product(roots_new.inv, inst_.A[j]);
            const SymMatrix h_exact = gram_from_inverse(stacked_, roots_new.inv);
            const LuFactor f = lu_factor(h_exact.m);
            if (!f.singular) rec.newton_measure = dot(g_post, f.solve(g_post));

            const DifferenceMatrices dm = make_difference_matrices(
                prev_inv_sqrt_, roots_new.inv_sqrt, s_tilde_old, slack_.S_tilde);
            auditor_->observe(rec.t, dm, upd.r_t, *rec.slack_drift_fro);
        }
    }

    state_.y = std::move(y_new);
    state_.eta = eta_new;
    state_.S = s_new;
    state_.S_inv = roots_new.inv;
    prev_inv_sqrt_ = std::move(roots_new.inv_sqrt);

    rec.eta = eta_new;
    rec.ops = op_counters() - ops_before;
    rec.wall_time_us = std::chrono::duration<double, std::micro>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
    return rec;
}

namespace {

int default_budget(int n, const SolverConfig& cfg) {
    const double t = 40.0 / cfg.eps_newton * std::sqrt(static_cast<double>(n)) *
                     std::log(static_cast<double>(n) / cfg.eps);
    return static_cast<int>(std::ceil(t));
}

Solution build_modified_solution(const SdpInstance& mod, const DualState& state) {
    Solution sol;
    sol.X = SymMatrix::symmetrized((1.0 / state.eta) * state.S_inv.m);
    sol.y = state.y;
    sol.objective = matrix_inner(mod.C, sol.X);
    sol.duality_gap = dot(mod.b, state.y) - sol.objective;
    double residual = 0.0;
    for (int i = 0; i < mod.m; ++i)
        residual += std::fabs(matrix_inner(mod.A[i], sol.X) - mod.b[i]);
    sol.primal_residual = residual;
    const SpectralDecomp dec = sym_eig(sol.X);
    sol.psd_violation = std::max(0.0, -dec.lambda.front());
    return sol;
}

}  // namespace

SolveResult solve(const SdpInstance& inst, double R, double L, const SolverConfig& cfg,
                  const IterationObserver& observer) {
    validate_config(cfg);
    SolveResult out;
    out.init = build_modified(inst, R, L, cfg.eps);
    const SdpInstance& mod = out.init.modified;
    const int nb = mod.n;

    // The feasible pair of the modified problem is centered at eta = 1:
    // <A_bar_i, I> = b_bar_i makes the barrier gradient O(delta) there.
    const double eta0 = 1.0;
    const double threshold =
        nb * (1.0 + 2.0 * cfg.eps_newton) / (cfg.eps * cfg.eps);
    const int budget = cfg.max_iters > 0 ? cfg.max_iters : default_budget(nb, cfg);

    BarrierSolver solver(mod, out.init.y0, eta0, cfg);
    out.stats.initial_newton_measure = solver.initial_newton_measure();

    TraceWriter trace(cfg.trace_path);

    while (solver.state().eta < threshold && solver.iteration() < budget) {
        IterationRecord rec = solver.step();
        out.stats.max_rank = std::max(out.stats.max_rank, rec.r_t);
        trace.write_iteration(rec);
        if (observer) observer(solver.state(), rec);
        out.records.push_back(std::move(rec));
    }

    out.stats.iterations = solver.iteration();
    out.stats.final_eta = solver.state().eta;
    out.stats.eta_threshold = threshold;
    out.stats.delta = cfg.eps;

    out.modified_solution = build_modified_solution(mod, solver.state());
    out.stats.gap = out.modified_solution.duality_gap;
    out.stats.dual_objective = dot(mod.b, solver.state().y);
    out.stats.converged = out.modified_solution.duality_gap <= cfg.eps * cfg.eps;
    out.solution = extract_solution_unchecked(inst, out.modified_solution, R);

    if (const PotentialAuditor* aud = solver.auditor()) {
        out.lemma_checks = aud->records();
        out.stats.assumption_violations = aud->assumption_violations();
        out.stats.s_move_failures = aud->s_move_failures();
        out.stats.stilde_move_failures = aud->stilde_move_failures();
        out.stats.telescoping_error = aud->telescoping_error();
        out.stats.amortization = aud->report();
        trace.write_lemma_checks(out.lemma_checks);
        trace.write_amortization(*out.stats.amortization);
    }
    trace.write_summary(out.stats);
    return out;
}

}  // namespace lazysdp
