#include "lazysdp/initializer.hpp"

#include <cmath>
#include <stdexcept>

namespace lazysdp {

InitializedProblem build_modified(const SdpInstance& inst, double R, double L, double delta) {
    if (!(R > 0.0)) throw std::invalid_argument("build_modified: R must be positive");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("build_modified: delta must lie in (0, 1]");
    const double c_norm = spectral_norm_sym(inst.C);
    if (!(L > 0.0) || L < c_norm * (1.0 - 1e-12))
        throw std::invalid_argument("build_modified: L must satisfy L >= ||C||_2 = " +
                                    std::to_string(c_norm));

    const int n = inst.n, m = inst.m;
    const int nb = n + 2;
    const double scale = delta / L;

    InitializedProblem out;
    out.R = R;
    out.L = L;
    out.delta = delta;

    SdpInstance& mod = out.modified;
    mod.n = nb;
    mod.m = m + 1;

    // C_bar = blockdiag(C * delta/L, 0, -1)
    Matrix cbar(nb, nb);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) cbar(i, j) = inst.C(i, j) * scale;
    cbar(nb - 1, nb - 1) = -1.0;
    mod.C = SymMatrix::require(std::move(cbar));

    // A_bar_i = blockdiag(A_i, 0, b_i/R - tr A_i)
    mod.A.reserve(m + 1);
    for (int k = 0; k < m; ++k) {
        Matrix abar(nb, nb);
        double tr = 0.0;
        for (int j = 0; j < n; ++j) {
            tr += inst.A[k](j, j);
            for (int i = 0; i < n; ++i) abar(i, j) = inst.A[k](i, j);
        }
        abar(nb - 1, nb - 1) = inst.b[k] / R - tr;
        mod.A.push_back(SymMatrix::require(std::move(abar)));
    }
    // A_bar_{m+1} = blockdiag(I_n, 1, 0)
    Matrix alast(nb, nb);
    for (int i = 0; i < n + 1; ++i) alast(i, i) = 1.0;
    mod.A.push_back(SymMatrix::require(std::move(alast)));

    mod.b.resize(m + 1);
    for (int k = 0; k < m; ++k) mod.b[k] = inst.b[k] / R;
    mod.b[m] = static_cast<double>(n) + 1.0;

    // y_bar = [0_m; 1], S_bar = blockdiag(I_n - C*delta/L, 1, 1), X_bar = I.
    out.y0.assign(m + 1, 0.0);
    out.y0[m] = 1.0;

    Matrix s0(nb, nb);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) s0(i, j) = -inst.C(i, j) * scale;
        s0(j, j) += 1.0;
    }
    s0(n, n) = 1.0;
    s0(nb - 1, nb - 1) = 1.0;
    out.S0 = SymMatrix::require(std::move(s0));

    const SpectralDecomp dec = sym_eig(out.S0);
    if (dec.lambda.front() <= 0.0) throw InfeasibleInitialization(dec.lambda.front());

    out.X0 = SymMatrix::identity(nb);
    return out;
}

Solution extract_solution_unchecked(const SdpInstance& original, const Solution& modified_sol,
                                    double R) {
    const int n = original.n;
    Matrix xhat(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) xhat(i, j) = R * modified_sol.X(i, j);

    Solution out;
    out.X = SymMatrix::symmetrized(std::move(xhat));
    out.y = Vector(modified_sol.y.begin(),
                   modified_sol.y.begin() + std::min<std::size_t>(original.m, modified_sol.y.size()));
    out.objective = matrix_inner(original.C, out.X);
    out.duality_gap = modified_sol.duality_gap;

    double residual = 0.0;
    for (int i = 0; i < original.m; ++i)
        residual += std::fabs(matrix_inner(original.A[i], out.X) - original.b[i]);
    out.primal_residual = residual;

    const SpectralDecomp dec = sym_eig(out.X);
    out.psd_violation = std::max(0.0, -dec.lambda.front());
    return out;
}

Solution extract_solution(const SdpInstance& original, const Solution& modified_sol, double R,
                          double delta) {
    if (modified_sol.duality_gap > delta * delta)
        throw NotConverged(modified_sol.duality_gap, delta * delta);
    return extract_solution_unchecked(original, modified_sol, R);
}

}  // namespace lazysdp
