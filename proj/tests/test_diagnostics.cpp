#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lazysdp/diagnostics.hpp"
#include "test_helpers.hpp"

using namespace lazysdp;
using testutil::Rng;

namespace {

SymMatrix diag_sym(std::initializer_list<double> vals) {
    const int n = static_cast<int>(vals.size());
    Matrix m(n, n);
    int i = 0;
    for (double v : vals) m(i, i) = v, ++i;
    return SymMatrix::require(m);
}

// Brute-force oracle: |eigenvalues| sorted descending, dotted with g.
double potential_oracle(const SymMatrix& z, const Vector& g) {
    Vector lam = sym_eig(z).lambda;
    for (double& v : lam) v = std::fabs(v);
    std::sort(lam.rbegin(), lam.rend());
    double s = 0;
    for (std::size_t i = 0; i < lam.size(); ++i) s += g[i] * lam[i];
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("PotentialWeights: inv-sqrt values and custom validation") {
    PotentialWeights w = PotentialWeights::inv_sqrt(4);
    CHECK(w.label == "inv-sqrt");
    CHECK(w.g[0] == doctest::Approx(1.0));
    CHECK(w.g[3] == doctest::Approx(0.5));
    CHECK(w.norm2() == doctest::Approx(std::sqrt(1.0 + 0.5 + 1.0 / 3 + 0.25)));

    CHECK_THROWS_AS(PotentialWeights::custom({1.0, -0.5}, "bad"), std::invalid_argument);
    CHECK_THROWS_AS(PotentialWeights::custom({0.5, 1.0}, "increasing"), std::invalid_argument);
    CHECK_NOTHROW(PotentialWeights::custom({2.0, 2.0, 1.0}, "steps"));
}

TEST_CASE("potential: zero matrix, frozen hand value, random oracle") {
    PotentialWeights w2 = PotentialWeights::custom({1.0, 1.0 / std::sqrt(2.0)}, "hand");
    CHECK(potential(SymMatrix::zero(2), w2) == 0.0);

    // lambda = {0.3, -0.5}: 1 * 0.5 + (1/sqrt 2) * 0.3.
    const double expected = 0.5 + 0.3 / std::sqrt(2.0);
    CHECK(potential(diag_sym({0.3, -0.5}), w2) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.7121).epsilon(1e-4));

    Rng rng(601);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 5;
        SymMatrix z = testutil::random_symmetric(rng, n);
        PotentialWeights w = PotentialWeights::inv_sqrt(n);
        CHECK(std::fabs(potential(z, w) - potential_oracle(z, w.g)) <= 1e-10);
    }
}

TEST_CASE("potential: monotone in entrywise-larger weights and non-negative") {
    Rng rng(607);
    for (int trial = 0; trial < 20; ++trial) {
        SymMatrix z = testutil::random_symmetric(rng, 4);
        PotentialWeights g1 = PotentialWeights::custom({1.0, 0.8, 0.5, 0.2}, "small");
        PotentialWeights g2 = PotentialWeights::custom({1.5, 1.0, 0.9, 0.9}, "large");
        const double p1 = potential(z, g1);
        const double p2 = potential(z, g2);
        CHECK(p1 >= 0.0);
        CHECK(p2 >= p1);
    }
}

TEST_CASE("check_s_move: no-move case passes, violated assumption is skipped") {
    PotentialWeights w = PotentialWeights::inv_sqrt(3);
    MoveCheck ok = check_s_move(0.4, 0.4, w, true);
    CHECK(ok.status == CheckStatus::pass);
    CHECK(ok.margin == doctest::Approx(w.norm2() + 1e-8));

    MoveCheck skipped = check_s_move(0.0, 100.0, w, false);
    CHECK(skipped.status == CheckStatus::skipped);

    MoveCheck fail = check_s_move(0.0, w.norm2() + 1.0, w, true);
    CHECK(fail.status == CheckStatus::fail);
}

TEST_CASE("check_stilde_move: trivial at r_t = 0 and exact on the diagonal example") {
    PotentialWeights w = PotentialWeights::inv_sqrt(2);
    CHECK(check_stilde_move(0.7, 0.7, 0, w, 2).status == CheckStatus::pass);

    // Diagonal slack example: Z_mid = diag(-1/3, 0), Z_new = 0, r_t = 1.
    const double phi_mid = potential(diag_sym({-1.0 / 3.0, 0.0}), w);
    CHECK(phi_mid == doctest::Approx(1.0 / 3.0));
    MoveCheck c = check_stilde_move(phi_mid, 0.0, 1, w, 2);
    CHECK(c.status == CheckStatus::pass);
    // Decrease equals Phi(Z_mid) exactly; required bound uses log guard 2.
    const double required = 0.01 / (10.0 * 2.0) * 1.0 * w.g[0];
    CHECK(c.margin == doctest::Approx(phi_mid - required + 1e-8));
}

TEST_CASE("amortization_report: idle run, single full-rank event, bad ranks") {
    PotentialWeights w8 = PotentialWeights::inv_sqrt(8);
    AmortizationReport idle = amortization_report(std::vector<int>(5, 0), w8, 8);
    CHECK(idle.sum_rg == 0.0);
    CHECK(idle.ratio == 0.0);

    // One iteration with r_t = n = 8: sum = 8 / sqrt(8) = sqrt(8).
    AmortizationReport one = amortization_report({8}, w8, 8);
    CHECK(one.sum_rg == doctest::Approx(std::sqrt(8.0)));
    CHECK(one.bound == doctest::Approx(w8.norm2() * std::log(8.0)));
    CHECK(one.sum_rg <= one.bound);
    CHECK(one.ratio <= 1.0);

    CHECK_THROWS_AS(amortization_report({9}, w8, 8), std::invalid_argument);
    CHECK_THROWS_AS(amortization_report({-1}, w8, 8), std::invalid_argument);
}

TEST_CASE("make_difference_matrices matches the definitions") {
    Rng rng(613);
    SymMatrix s = testutil::random_spd(rng, 3);
    SymMatrix s_new = testutil::random_spd(rng, 3);
    SymMatrix s_tilde = testutil::random_spd(rng, 3);
    SymMatrix s_tilde_new = testutil::random_spd(rng, 3);

    const SymMatrix ri = psd_inv_sqrt(s);
    const SymMatrix rn = psd_inv_sqrt(s_new);
    DifferenceMatrices dm = make_difference_matrices(ri, rn, s_tilde, s_tilde_new);

    CHECK(testutil::abs_fro_diff(dm.Z.m,
                                 ri.m * s_tilde.m * ri.m - Matrix::identity(3)) < 1e-12);
    CHECK(testutil::abs_fro_diff(dm.Z_mid.m,
                                 rn.m * s_tilde.m * rn.m - Matrix::identity(3)) < 1e-12);
    CHECK(testutil::abs_fro_diff(dm.Z_new.m,
                                 rn.m * s_tilde_new.m * rn.m - Matrix::identity(3)) < 1e-12);
}

TEST_CASE("auditor: randomized stress inside the closeness assumption") {
    // Pairs built to satisfy the assumption exactly: drift <= 0.02 in
    // Frobenius, ||Z||_2 <= 0.01. The S-move lemma and the displacement bound
    // must then hold.
    Rng rng(617);
    const int n = 6;
    PotentialWeights w = PotentialWeights::inv_sqrt(n);
    PotentialAuditor auditor(w, n);

    for (int trial = 0; trial < 25; ++trial) {
        SymMatrix s = testutil::random_spd(rng, n);
        const SymMatrix root = psd_sqrt(s);

        SymMatrix e = testutil::random_symmetric(rng, n);
        const double efro = frobenius_norm(e.m);
        const double drift_target = 0.019 * (trial % 5 + 1) / 5.0;
        const Matrix s_new_m =
            root.m * (Matrix::identity(n) + (drift_target / efro) * e.m) * root.m;
        const SymMatrix s_new = SymMatrix::symmetrized(s_new_m);

        SymMatrix z0 = testutil::random_symmetric(rng, n);
        const double z0n = spectral_norm_sym(z0);
        const Matrix s_tilde_m =
            root.m * (Matrix::identity(n) + (0.0099 / z0n) * z0.m) * root.m;
        const SymMatrix s_tilde = SymMatrix::symmetrized(s_tilde_m);

        const SymMatrix ri = psd_inv_sqrt(s);
        const SymMatrix rn = psd_inv_sqrt(s_new);
        const double drift = frobenius_norm(ri.m * s_new.m * ri.m - Matrix::identity(n));
        REQUIRE(drift <= 0.02);

        DifferenceMatrices dm = make_difference_matrices(ri, rn, s_tilde, s_tilde);
        LemmaCheckRecord rec = auditor.observe(trial + 1, dm, 0, drift);
        CHECK(rec.assumption_ok);
        CHECK(rec.s_move.status == CheckStatus::pass);
        CHECK(rec.stilde_move.status == CheckStatus::pass);  // Z_new = Z_mid, r_t = 0
        CHECK(rec.eig_displacement_sq <= 1e-3);
    }
    CHECK(auditor.assumption_violations() == 0);
    CHECK(auditor.s_move_failures() == 0);
}

TEST_SUITE_END();
