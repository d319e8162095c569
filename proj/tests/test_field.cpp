#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tgf/field.hpp"

using namespace tgf;

namespace {
const GridSpec kGrid{32, kTwoPi, 2};
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(validate(GridSpec{7, kTwoPi, 2}), std::invalid_argument);
    CHECK_THROWS_AS(validate(GridSpec{6, kTwoPi, 2}), std::invalid_argument);
    CHECK_THROWS_AS(validate(GridSpec{32, -1.0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(validate(GridSpec{32, kTwoPi, 1}), std::invalid_argument);
    CHECK_NOTHROW(validate(kGrid));
    CHECK(kGrid.lambda_poincare() == doctest::Approx(1.0));
    CHECK(GridSpec{32, kTwoPi / 2.0, 2}.lambda_poincare() == doctest::Approx(4.0));
}

TEST_CASE("leray annihilates gradients") {
    // grad(cos x) = (-sin x, 0): coefficient i/2 at k=(1,0)
    SpectralField gradphi = field_from_modes(kGrid, {{0, 1, 0, cplx(0.0, 0.5)}});
    SpectralField p = leray_project(gradphi);
    CHECK(norm(p, NormKind::L2) <= 1e-14 * norm(gradphi, NormKind::L2));
}

TEST_CASE("leray fixes the Taylor-Green field") {
    SpectralField tg = taylor_green(kGrid, 1.3);
    SpectralField p = leray_project(tg);
    CHECK(norm(subbed(p, tg), NormKind::L2) <= 1e-14 * norm(tg, NormKind::L2));
    CHECK(relative_divergence(tg) <= 1e-12);
}

TEST_CASE("leray idempotent and self-adjoint on random raw fields") {
    double worst_idem = 0.0, worst_adj = 0.0;
    for (int i = 0; i < 100; ++i) {
        SpectralField f = oracle::raw_field(kGrid, 100 + i);
        SpectralField g = oracle::raw_field(kGrid, 500 + i);
        SpectralField pf = leray_project(f);
        worst_idem = std::max(worst_idem, norm(subbed(leray_project(pf), pf), NormKind::L2) /
                                              norm(pf, NormKind::L2));
        const double a = l2_inner(pf, g), b = l2_inner(f, leray_project(g));
        worst_adj = std::max(
            worst_adj, std::abs(a - b) / (norm(f, NormKind::L2) * norm(g, NormKind::L2)));
    }
    CHECK(worst_idem <= 1e-14);
    CHECK(worst_adj <= 1e-13);
}

TEST_CASE("norms of the shear field match analytic values") {
    SpectralField m = oracle::shear_field(kGrid);
    const double pi = oracle::kPi;

    // oracle: quadrature of the analytic field
    const double l2sq = oracle::integral_2d(
        [](double, double y) { return std::sin(y) * std::sin(y); }, kTwoPi);
    CHECK(norm(m, NormKind::L2) == doctest::Approx(std::sqrt(l2sq)).epsilon(1e-13));
    CHECK(norm(m, NormKind::L2) == doctest::Approx(pi * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(norm(m, NormKind::V) == doctest::Approx(pi * std::sqrt(2.0)).epsilon(1e-14));
    // |k| = 1 mode: H^-1 equals L2
    CHECK(norm(m, NormKind::Hminus1) == doctest::Approx(pi * std::sqrt(2.0)).epsilon(1e-14));

    const double l4_4 = oracle::integral_2d(
        [](double, double y) { return std::pow(std::sin(y), 4); }, kTwoPi);
    CHECK(std::pow(norm(m, NormKind::L4), 4) == doctest::Approx(l4_4).epsilon(1e-12));
    CHECK(norm(m, NormKind::Linf) == doctest::Approx(1.0).epsilon(1e-14));

    const double w14_4 = l4_4 + oracle::integral_2d(
        [](double, double y) { return std::pow(std::cos(y), 4); }, kTwoPi);
    CHECK(std::pow(norm(m, NormKind::W14), 4) == doctest::Approx(w14_4).epsilon(1e-12));
}

TEST_CASE("zero field has zero norms") {
    SpectralField z(kGrid);
    for (NormKind k : {NormKind::L2, NormKind::V, NormKind::L4, NormKind::W14, NormKind::Linf,
                       NormKind::Hminus1})
        CHECK(norm(z, k) == 0.0);
}

TEST_CASE("Hminus1 rejected on tensor fields") {
    TensorField a = sym_grad(oracle::shear_field(kGrid));
    CHECK_THROWS_AS(norm(a, NormKind::Hminus1), std::invalid_argument);
    CHECK_THROWS_AS(norm(a, NormKind::V), std::invalid_argument);
}

TEST_CASE("sym_grad of the shear field") {
    SpectralField m = oracle::shear_field(kGrid);
    TensorField a = sym_grad(m);
    // A = [[0, cos y], [cos y, 0]]
    const int mp = kGrid.pad();
    const double h = kGrid.L / mp;
    double worst = 0.0;
    for (int iy = 0; iy < mp; iy += 5) {
        const double c = std::cos(h * iy);
        const std::size_t s = static_cast<std::size_t>(3) * mp + iy;  // ix = 3 arbitrary
        worst = std::max({worst, std::abs(a.e[0][s]), std::abs(a.e[1][s] - c),
                          std::abs(a.e[2][s] - c), std::abs(a.e[3][s])});
    }
    CHECK(worst <= 1e-13);
    CHECK(norm(sym_grad(SpectralField(kGrid)), NormKind::L2) == 0.0);
}

TEST_CASE("sym_grad is symmetric and traceless on random fields") {
    for (int i = 0; i < 10; ++i) {
        SpectralField m = random_divfree_field(kGrid, 2.0, 900 + i);
        TensorField a = sym_grad(m);
        double sym = 0.0, tr = 0.0, mag = 0.0;
        for (std::size_t s = 0; s < a.e[0].size(); ++s) {
            sym = std::max(sym, std::abs(a.e[1][s] - a.e[2][s]));
            tr = std::max(tr, std::abs(a.e[0][s] + a.e[3][s]));
            mag = std::max(mag, std::abs(a.e[0][s]) + std::abs(a.e[1][s]));
        }
        CHECK(sym == 0.0);  // both entries stored from one expression
        CHECK(tr <= 1e-12 * mag);
    }
}

TEST_CASE("random divergence-free fields: determinism and invariants") {
    SpectralField a = random_divfree_field(kGrid, 3.0, 12345);
    SpectralField b = random_divfree_field(kGrid, 3.0, 12345);
    for (int comp = 0; comp < 2; ++comp)
        for (std::size_t s = 0; s < a.c[comp].size(); ++s)
            CHECK(a.c[comp][s] == b.c[comp][s]);  // bitwise
    CHECK(relative_divergence(a) <= 1e-12);
    CHECK(conjugate_symmetry_error(a) == 0.0);
    CHECK(norm(a, NormKind::L2) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(a.c[0][0]) == 0.0);  // zero mean
}

TEST_CASE("random fields: W14 norm stable under grid refinement") {
    // exponent 3 tail: the shared low modes carry the norm
    SpectralField a32 = random_divfree_field(GridSpec{32, kTwoPi, 2}, 3.0, 777);
    SpectralField a64 = random_divfree_field(GridSpec{64, kTwoPi, 2}, 3.0, 777);
    const double w32 = norm(a32, NormKind::W14), w64 = norm(a64, NormKind::W14);
    CHECK(std::abs(w32 - w64) / w64 <= 0.01);
}

TEST_CASE("Poincare inequality with equality on the lowest mode") {
    const double lam = kGrid.lambda_poincare();
    for (int i = 0; i < 50; ++i) {
        SpectralField m = random_divfree_field(kGrid, 2.0, 4000 + i);
        const double l2 = norm(m, NormKind::L2), v = norm(m, NormKind::V);
        CHECK(lam * l2 * l2 <= v * v * (1.0 + 1e-12));
    }
    SpectralField low = oracle::shear_field(kGrid);
    const double l2 = norm(low, NormKind::L2), v = norm(low, NormKind::V);
    CHECK(lam * l2 * l2 == doctest::Approx(v * v).epsilon(1e-13));
}

TEST_CASE("checkpoint round trip is bitwise") {
    SpectralField a = random_divfree_field(kGrid, 2.5, 31337);
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    save_field(ss, a);
    SpectralField b = load_field(ss);
    REQUIRE(b.grid == a.grid);
    for (int comp = 0; comp < 2; ++comp)
        for (std::size_t s = 0; s < a.c[comp].size(); ++s) CHECK(a.c[comp][s] == b.c[comp][s]);
}

TEST_CASE("checkpoint rejects bad magic") {
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    ss << "NOPE" << std::string(64, '\0');
    CHECK_THROWS_AS(load_field(ss), std::runtime_error);
}

TEST_CASE("field_from_modes input validation") {
    CHECK_THROWS_AS(field_from_modes(kGrid, {{0, 0, 0, cplx(1.0, 0.0)}}), std::invalid_argument);
    CHECK_THROWS_AS(field_from_modes(kGrid, {{0, 16, 0, cplx(1.0, 0.0)}}), std::invalid_argument);
    CHECK_THROWS_AS(field_from_modes(kGrid, {{2, 1, 0, cplx(1.0, 0.0)}}), std::invalid_argument);
}

TEST_CASE("spectrum exponent at most one is rejected") {
    CHECK_THROWS_AS(random_divfree_field(kGrid, 1.0, 1), std::invalid_argument);
}
