#include <doctest.h>

#include <cmath>

#include "lazysdp/slack.hpp"
#include "test_helpers.hpp"

using namespace lazysdp;
using testutil::Rng;

namespace {

SymMatrix diag2(double a, double b) {
    Matrix m(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return SymMatrix::require(m);
}

// Largest |eigenvalue| of S_new^(-1/2) S_tilde S_new^(-1/2) - I.
double relative_spectral_gap(const SymMatrix& s_new, const SymMatrix& s_tilde) {
    const SymMatrix r = psd_inv_sqrt(s_new);
    const SymMatrix z =
        SymMatrix::symmetrized(r.m * s_tilde.m * r.m - Matrix::identity(s_new.dim()));
    return spectral_norm_sym(z);
}

}  // namespace

TEST_SUITE_BEGIN("slack_maintainer");

TEST_CASE("low_rank_slack_update: fixed point produces no update") {
    Rng rng(301);
    SymMatrix s = testutil::random_spd(rng, 4);
    ApproxSlackState st = make_slack_state(s);
    LowRankUpdate upd = low_rank_slack_update(s, st);
    CHECK(upd.r_t == 0);
    CHECK(upd.V1.cols == 0);

    SlackWoodburyFactors w = apply_update(st, upd);
    CHECK(!w.fallback_used);
    CHECK(testutil::abs_fro_diff(st.S_tilde.m, s.m) == 0.0);
}

TEST_CASE("low_rank_slack_update: hand-computed diagonal case") {
    ApproxSlackState st = make_slack_state(SymMatrix::identity(2));
    const SymMatrix s_new = diag2(1.5, 1.0);

    LowRankUpdate upd = low_rank_slack_update(s_new, st);
    // Z_mid = diag(1/1.5 - 1, 0): eigenvalues {-1/3, 0}; the while loop exits
    // at r = 1, both leading slots zeroed, but only the nonzero eigenvalue
    // lands in the support.
    REQUIRE(upd.r_t == 1);
    Matrix prod = upd.V1 * transpose(upd.V2);
    CHECK(prod(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::fabs(prod(1, 1)) < 1e-14);
    CHECK(std::fabs(prod(0, 1)) < 1e-14);

    SlackWoodburyFactors w = apply_update(st, upd);
    CHECK(!w.fallback_used);
    // S_tilde_new = S_new exactly, so its inverse is diag(1/1.5, 1).
    CHECK(testutil::rel_fro_diff(st.S_tilde.m, s_new.m) < 1e-12);
    CHECK(st.S_tilde_inv(0, 0) == doctest::Approx(1.0 / 1.5).epsilon(1e-12));
    CHECK(st.S_tilde_inv(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("low_rank_slack_update: post-update spectral bound at n = 6") {
    Rng rng(307);
    for (int trial = 0; trial < 20; ++trial) {
        SymMatrix s_tilde = testutil::random_spd(rng, 6);
        ApproxSlackState st = make_slack_state(s_tilde);

        // Perturb multiplicatively so that || Z_mid ||_2 lands above eps_S.
        const SymMatrix root = psd_sqrt(s_tilde);
        SymMatrix e = testutil::random_symmetric(rng, 6);
        const double target = 0.02 + 0.08 * (trial % 5) / 4.0;
        const double scale = target / spectral_norm_sym(e);
        const SymMatrix s_new =
            SymMatrix::symmetrized(root.m * (Matrix::identity(6) + scale * e.m) * root.m);

        REQUIRE(relative_spectral_gap(s_new, st.S_tilde) > st.eps_S);
        LowRankUpdate upd = low_rank_slack_update(s_new, st);
        CHECK(upd.r_t > 0);
        CHECK(upd.r_t <= 6);
        CHECK(symmetry_defect(st.S_tilde.m + upd.V1 * transpose(upd.V2)) < 1e-9);

        apply_update(st, upd);
        CHECK(relative_spectral_gap(s_new, st.S_tilde) <= st.eps_S + 1e-12);

        // Sandwich in the alpha_S = 1.011 sense.
        const SymMatrix r = psd_inv_sqrt(s_new);
        const SpectralDecomp dec =
            sym_eig(SymMatrix::symmetrized(r.m * st.S_tilde.m * r.m));
        CHECK(dec.lambda.front() >= 1.0 / 1.011);
        CHECK(dec.lambda.back() <= 1.011);
    }
}

TEST_CASE("apply_update: Woodbury inverse matches direct inversion") {
    Rng rng(311);
    for (int trial = 0; trial < 20; ++trial) {
        SymMatrix s_tilde = testutil::random_spd(rng, 5);
        ApproxSlackState st = make_slack_state(s_tilde);

        const SymMatrix root = psd_sqrt(s_tilde);
        SymMatrix e = testutil::random_symmetric(rng, 5);
        const double scale = 0.05 / spectral_norm_sym(e);
        const SymMatrix s_new =
            SymMatrix::symmetrized(root.m * (Matrix::identity(5) + scale * e.m) * root.m);

        LowRankUpdate upd = low_rank_slack_update(s_new, st);
        SlackWoodburyFactors w = apply_update(st, upd);
        if (upd.r_t == 0) continue;
        REQUIRE(!w.fallback_used);

        const Matrix direct = lu_inverse(st.S_tilde.m);
        CHECK(testutil::rel_fro_diff(st.S_tilde_inv.m, direct) < 1e-8);
        CHECK(frobenius_norm(st.S_tilde_inv.m * st.S_tilde.m - Matrix::identity(5)) < 1e-8);
        CHECK(frobenius_norm(st.S_tilde_inv_sqrt.m * st.S_tilde.m * st.S_tilde_inv_sqrt.m -
                             Matrix::identity(5)) < 1e-8);

        // V3 V4^T is the inverse increment.
        const Matrix incr = w.V3 * transpose(w.V4);
        CHECK(testutil::rel_fro_diff(lu_inverse(s_tilde.m) + incr, direct) < 1e-8);
    }
}

TEST_CASE("low_rank_slack_update: closed form of the updated slack") {
    Rng rng(313);
    SymMatrix s_tilde = testutil::random_spd(rng, 6);
    ApproxSlackState st = make_slack_state(s_tilde);

    const SymMatrix root = psd_sqrt(s_tilde);
    SymMatrix e = testutil::random_symmetric(rng, 6);
    const double scale = 0.06 / spectral_norm_sym(e);
    const SymMatrix s_new =
        SymMatrix::symmetrized(root.m * (Matrix::identity(6) + scale * e.m) * root.m);

    LowRankUpdate upd = low_rank_slack_update(s_new, st);
    REQUIRE(upd.r_t > 0);
    apply_update(st, upd);

    // S_tilde_new = S_new + S_new^(1/2) U diag(lambda_new) U^T S_new^(1/2):
    // equivalently Z_new has exactly the surviving eigenvalues, all <= eps_S.
    const PdRoots roots = pd_roots(s_new, "test");
    const SymMatrix z_new = SymMatrix::symmetrized(
        roots.inv_sqrt.m * st.S_tilde.m * roots.inv_sqrt.m - Matrix::identity(6));
    const SpectralDecomp zd = sym_eig(z_new);
    for (double l : zd.lambda) CHECK(std::fabs(l) <= st.eps_S + 1e-8);

    const Matrix reconstructed =
        roots.sqrt.m * z_new.m * roots.sqrt.m + s_new.m;
    CHECK(testutil::rel_fro_diff(reconstructed, st.S_tilde.m) < 1e-8);
}

TEST_CASE("low_rank_slack_update: rank law and trigger threshold") {
    Rng rng(317);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 5;
        SymMatrix s_tilde = testutil::random_spd(rng, n);
        ApproxSlackState st = make_slack_state(s_tilde);
        const SymMatrix root = psd_sqrt(s_tilde);
        SymMatrix e = testutil::random_symmetric(rng, n);
        const double scale = (0.002 + 0.01 * (trial % 7)) / spectral_norm_sym(e);
        const SymMatrix s_new =
            SymMatrix::symmetrized(root.m * (Matrix::identity(n) + scale * e.m) * root.m);

        const double gap = relative_spectral_gap(s_new, st.S_tilde);
        LowRankUpdate upd = low_rank_slack_update(s_new, st);
        CHECK(upd.r_t <= n);
        if (gap <= st.eps_S) {
            CHECK(upd.r_t == 0);
        } else {
            CHECK(upd.r_t > 0);
        }
    }
}

TEST_CASE("apply_update: near-singular inner system falls back to a direct rebuild") {
    ApproxSlackState st = make_slack_state(SymMatrix::identity(2));
    LowRankUpdate upd;
    upd.r_t = 1;
    upd.V1 = Matrix(2, 1);
    upd.V1(0, 0) = -1.0 + 1e-13;
    upd.V2 = Matrix(2, 1);
    upd.V2(0, 0) = 1.0;

    SlackWoodburyFactors w = apply_update(st, upd);
    CHECK(w.fallback_used);
    // The state is still consistent after the rebuild.
    CHECK(frobenius_norm(st.S_tilde_inv.m * st.S_tilde.m - Matrix::identity(2)) < 1e-6);
}

TEST_SUITE_END();
