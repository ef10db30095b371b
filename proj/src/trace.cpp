#include "lazysdp/trace.hpp"

#include <json.hpp>

#include "lazysdp/solver.hpp"

namespace lazysdp {

using nlohmann::json;

namespace {
json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        default: return "skipped";
    }
}
}  // namespace

TraceWriter::TraceWriter(const std::string& path) {
    if (!path.empty()) out_.open(path, std::ios::trunc);
}

TraceWriter::~TraceWriter() {
    if (out_.is_open()) out_.flush();
}

void TraceWriter::write_iteration(const IterationRecord& rec) {
    if (!out_.is_open()) return;
    json j{{"type", "iteration"},
           {"t", rec.t},
           {"eta", rec.eta},
           {"r_t", rec.r_t},
           {"newton_measure", opt(rec.newton_measure)},
           {"slack_drift_fro", opt(rec.slack_drift_fro)},
           {"sandwich_min", opt(rec.sandwich_min)},
           {"sandwich_max", opt(rec.sandwich_max)},
           {"g_fidelity", opt(rec.g_fidelity)},
           {"slack_fallback", rec.slack_fallback},
           {"hessian_fallback", rec.hessian_fallback},
           {"wall_time_us", rec.wall_time_us},
           {"flop_counters",
            {{"matmul_flops", rec.ops.matmul_flops},
             {"eig_calls", rec.ops.eig_calls},
             {"lu_factorizations", rec.ops.lu_factorizations},
             {"kron_entries", rec.ops.kron_entries}}}};
    out_ << j.dump() << '\n';
}

void TraceWriter::write_lemma_checks(const std::vector<LemmaCheckRecord>& checks) {
    if (!out_.is_open()) return;
    for (const LemmaCheckRecord& c : checks) {
        json j{{"type", "lemma_check"},
               {"t", c.t},
               {"r_t", c.r_t},
               {"assumption_ok", c.assumption_ok},
               {"slack_drift_fro", c.slack_drift_fro},
               {"z_norm2", c.z_norm2},
               {"phi_z", c.phi_z},
               {"phi_z_mid", c.phi_z_mid},
               {"phi_z_new", c.phi_z_new},
               {"eig_displacement_sq", c.eig_displacement_sq},
               {"s_move", {{"status", status_name(c.s_move.status)}, {"margin", c.s_move.margin}}},
               {"stilde_move",
                {{"status", status_name(c.stilde_move.status)}, {"margin", c.stilde_move.margin}}}};
        out_ << j.dump() << '\n';
    }
}

void TraceWriter::write_amortization(const AmortizationReport& rep) {
    if (!out_.is_open()) return;
    json j{{"type", "amortization_report"},
           {"T", rep.T},
           {"sum_rg", rep.sum_rg},
           {"bound", rep.bound},
           {"ratio", rep.ratio},
           {"ranks", rep.ranks}};
    out_ << j.dump() << '\n';
}

void TraceWriter::write_summary(const SolveStats& stats) {
    if (!out_.is_open()) return;
    json j{{"type", "summary"},
           {"converged", stats.converged},
           {"iterations", stats.iterations},
           {"max_rank", stats.max_rank},
           {"final_eta", stats.final_eta},
           {"eta_threshold", stats.eta_threshold},
           {"delta", stats.delta},
           {"gap", stats.gap},
           {"dual_objective", stats.dual_objective},
           {"initial_newton_measure", opt(stats.initial_newton_measure)},
           {"assumption_violations", stats.assumption_violations},
           {"s_move_failures", stats.s_move_failures},
           {"stilde_move_failures", stats.stilde_move_failures},
           {"telescoping_error", stats.telescoping_error}};
    out_ << j.dump() << '\n';
    out_.flush();
}

}  // namespace lazysdp
