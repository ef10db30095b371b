#include "lazysdp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lazysdp {

namespace {
constexpr double kEpsS = 0.01;
constexpr double kCheckTol = 1e-8;

double guarded_log(int n) { return std::max(std::log(static_cast<double>(n)), 2.0); }
}  // namespace

PotentialWeights PotentialWeights::inv_sqrt(int n) {
    PotentialWeights w;
    w.label = "inv-sqrt";
    w.g.resize(n);
    for (int i = 0; i < n; ++i) w.g[i] = 1.0 / std::sqrt(static_cast<double>(i + 1));
    return w;
}

PotentialWeights PotentialWeights::custom(Vector g, std::string label) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0.0)) throw std::invalid_argument("potential weights must be positive");
        if (i + 1 < g.size() && g[i] < g[i + 1])
            throw std::invalid_argument("potential weights must be non-increasing");
    }
    PotentialWeights w;
    w.g = std::move(g);
    w.label = std::move(label);
    return w;
}

double PotentialWeights::norm2() const {
    double s = 0.0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
}

double potential_from_eigs(Vector lambda, const PotentialWeights& w) {
    if (lambda.size() != w.g.size())
        throw std::invalid_argument("potential: dimension mismatch between Z and g");
    for (double& v : lambda) v = std::fabs(v);
    std::sort(lambda.begin(), lambda.end(), std::greater<double>());
    double s = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) s += w.g[i] * lambda[i];
    return s;
}

double potential(const SymMatrix& z, const PotentialWeights& w) {
    return potential_from_eigs(sym_eig(z).lambda, w);
}

DifferenceMatrices make_difference_matrices(const SymMatrix& s_inv_sqrt,
                                            const SymMatrix& s_new_inv_sqrt,
                                            const SymMatrix& s_tilde,
                                            const SymMatrix& s_tilde_new) {
    const int n = s_tilde.dim();
    const Matrix id = Matrix::identity(n);
    DifferenceMatrices dm;
    dm.Z = SymMatrix::symmetrized(s_inv_sqrt.m * s_tilde.m * s_inv_sqrt.m - id);
    dm.Z_mid = SymMatrix::symmetrized(s_new_inv_sqrt.m * s_tilde.m * s_new_inv_sqrt.m - id);
    dm.Z_new = SymMatrix::symmetrized(s_new_inv_sqrt.m * s_tilde_new.m * s_new_inv_sqrt.m - id);
    return dm;
}

MoveCheck check_s_move(double phi_z, double phi_z_mid, const PotentialWeights& w,
                       bool assumption_ok) {
    MoveCheck c;
    if (!assumption_ok) {
        c.status = CheckStatus::skipped;
        return c;
    }
    c.margin = w.norm2() + kCheckTol - (phi_z_mid - phi_z);
    c.status = c.margin >= 0.0 ? CheckStatus::pass : CheckStatus::fail;
    return c;
}

MoveCheck check_stilde_move(double phi_z_mid, double phi_z_new, int r_t,
                            const PotentialWeights& w, int n) {
    MoveCheck c;
    double required = 0.0;
    if (r_t > 0) required = kEpsS / (10.0 * guarded_log(n)) * r_t * w.g[r_t - 1];
    c.margin = (phi_z_mid - phi_z_new) - (required - kCheckTol);
    c.status = c.margin >= 0.0 ? CheckStatus::pass : CheckStatus::fail;
    return c;
}

AmortizationReport amortization_report(const std::vector<int>& ranks, const PotentialWeights& w,
                                       int n) {
    AmortizationReport rep;
    rep.T = static_cast<int>(ranks.size());
    rep.ranks = ranks;
    for (int r : ranks) {
        if (r < 0 || r > n) throw std::invalid_argument("amortization_report: rank out of [0, n]");
        if (r > 0) rep.sum_rg += static_cast<double>(r) * w.g[r - 1];
    }
    rep.bound = rep.T * w.norm2() * std::log(static_cast<double>(n));
    rep.ratio = rep.bound > 0.0 ? rep.sum_rg / rep.bound : 0.0;
    return rep;
}

PotentialAuditor::PotentialAuditor(PotentialWeights w, int n) : w_(std::move(w)), n_(n) {
    if (w_.dim() != n) throw std::invalid_argument("PotentialAuditor: weight length must equal n");
}

LemmaCheckRecord PotentialAuditor::observe(int t, const DifferenceMatrices& dm, int r_t,
                                           double drift_fro) {
    LemmaCheckRecord rec;
    rec.t = t;
    rec.r_t = r_t;
    rec.slack_drift_fro = drift_fro;

    const SpectralDecomp ez = sym_eig(dm.Z);
    const SpectralDecomp ezm = sym_eig(dm.Z_mid);
    const SpectralDecomp ezn = sym_eig(dm.Z_new);

    rec.z_norm2 = std::max(std::fabs(ez.lambda.front()), std::fabs(ez.lambda.back()));
    rec.assumption_ok = drift_fro <= 0.02 && rec.z_norm2 <= 0.01;

    rec.phi_z = potential_from_eigs(ez.lambda, w_);
    rec.phi_z_mid = potential_from_eigs(ezm.lambda, w_);
    rec.phi_z_new = potential_from_eigs(ezn.lambda, w_);

    // Displacement of the value-sorted spectra (eigenvalues come out ascending).
    for (int i = 0; i < n_; ++i) {
        const double d = ez.lambda[i] - ezm.lambda[i];
        rec.eig_displacement_sq += d * d;
    }

    rec.s_move = check_s_move(rec.phi_z, rec.phi_z_mid, w_, rec.assumption_ok);
    rec.stilde_move = check_stilde_move(rec.phi_z_mid, rec.phi_z_new, r_t, w_, n_);

    if (!rec.assumption_ok) ++assumption_violations_;
    if (rec.s_move.status == CheckStatus::fail) ++s_move_failures_;
    if (rec.stilde_move.status == CheckStatus::fail) ++stilde_move_failures_;

    if (!any_) {
        first_phi_z_ = rec.phi_z;
        any_ = true;
    }
    last_phi_z_new_ = rec.phi_z_new;
    delta_sum_ += rec.phi_z_new - rec.phi_z;

    ranks_.push_back(r_t);
    records_.push_back(rec);
    return rec;
}

AmortizationReport PotentialAuditor::report() const {
    return amortization_report(ranks_, w_, n_);
}

double PotentialAuditor::telescoping_error() const {
    if (!any_) return 0.0;
    return std::fabs((last_phi_z_new_ - first_phi_z_) - delta_sum_);
}

}  // namespace lazysdp
