#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tgf/detsolver.hpp"

using namespace tgf;

namespace {
const GridSpec kGrid{32, kTwoPi, 2};

FluidParams params_basic(double md = 1.0) { return make_params(1.0, 0.0, 1.0, 1.0, md); }

SpectralField small_random(std::uint64_t seed, double amp = 0.3) {
    SpectralField f = random_divfree_field(kGrid, 3.0, seed);
    scale(f, amp);
    return f;
}
}  // namespace

TEST_CASE("rest state stays at rest") {
    SpectralField z(kGrid);
    SpectralField out = step_det(z, z, params_basic(), 1e-3);
    CHECK(norm(out, NormKind::L2) == 0.0);
}

TEST_CASE("integrating factor is exact on an eigenfield") {
    // nearly linear limit: beta tiny, convection vanishes on the shear field
    FluidParams p = make_params(1.0, 0.0, 1e-30, 1.0, 1.0);
    SpectralField m = oracle::shear_field(kGrid);
    const double dt = 1e-3;
    SpectralField one = step_det(m, SpectralField(kGrid), p, dt);
    CHECK(norm(one, NormKind::L2) ==
          doctest::Approx(std::exp(-dt) * norm(m, NormKind::L2)).epsilon(1e-14));
}

TEST_CASE("one unforced step contracts the L2 norm up to O(dt^2)") {
    FluidParams p = params_basic();
    const double dt = 1e-3;
    for (int i = 0; i < 10; ++i) {
        SpectralField m = small_random(60 + i);
        SpectralField out = step_det(m, SpectralField(kGrid), p, dt);
        const double before = norm(m, NormKind::L2), after = norm(out, NormKind::L2);
        // budget: dt^2 ||N(m)||^2 / (2 ||m||) with a crude constant
        CHECK(after <= before + 100.0 * dt * dt * before);
    }
}

TEST_CASE("invariants preserved along a run") {
    FluidParams p = params_basic();
    SpectralField m = small_random(61);
    SpectralField g = taylor_green(kGrid, 0.2);
    ImexCore core(kGrid, p, g, 1e-3);
    for (int s = 0; s < 200; ++s) core.step(m, m, nullptr, 0.0);
    CHECK(relative_divergence(m) <= 1e-12);
    CHECK(std::abs(m.c[0][0]) == 0.0);
    CHECK(std::abs(m.c[1][0]) == 0.0);
    CHECK(conjugate_symmetry_error(m) <= 1e-16 * norm(m, NormKind::Linf));
}

TEST_CASE("unforced energy monotone sample to sample") {
    FluidParams p = params_basic();
    SolverConfig cfg{1e-3, 1.0, 10, 1e-8};
    auto res = integrate_det(small_random(62), SpectralField(kGrid), p, cfg);
    const auto& l2 = res.record.l2;
    for (std::size_t i = 1; i < l2.size(); ++i) CHECK(l2[i] <= l2[i - 1] + 1e-12 * l2.front());
    // record invariants: strictly increasing times, nonnegative norms
    for (std::size_t i = 1; i < res.record.t.size(); ++i)
        CHECK(res.record.t[i] > res.record.t[i - 1]);
    for (std::size_t i = 0; i < res.record.t.size(); ++i) {
        CHECK(res.record.l2[i] >= 0.0);
        CHECK(res.record.vnorm[i] >= 0.0);
        CHECK(res.record.a_l4[i] >= 0.0);
    }
}

TEST_CASE("blow-up is reported with the failing step") {
    // gigantic state and huge explicit term force non-finite values quickly
    FluidParams p = make_params(1e-6, 0.0, 1.0, 1.0, 1.0);
    SpectralField m = random_divfree_field(kGrid, 1.5, 63);
    scale(m, 1e8);
    SolverConfig cfg{1.0, 50.0, 1, 1e-8};
    CHECK_THROWS_AS(integrate_det(m, SpectralField(kGrid), p, cfg), BlowupError);
}

TEST_CASE("energy residual: rest state and decaying run") {
    FluidParams p = params_basic();
    SolverConfig cfg{1e-3, 1.0, 20, 1e-8};

    auto rest = integrate_det(SpectralField(kGrid), SpectralField(kGrid), p, cfg);
    CHECK(energy_residual_max(rest.record) == 0.0);

    // For g = 0 the exact residual equals -nu ||m||_V^2; the sampled residual
    // deviates from it by the finite-difference error, which is O(sample dt)
    // and should roughly halve when dt halves at fixed sample spacing.
    auto run = [&](double dt, int stride) {
        SolverConfig c{dt, 0.5, stride, 1e-8};
        auto r = integrate_det(small_random(64), SpectralField(kGrid), p, c);
        double worst = 0.0;
        for (std::size_t i = 1; i < r.record.t.size(); ++i) {
            const double vmid = r.record.vnorm[i];
            worst = std::max(worst,
                             std::abs(r.record.energy_residual[i] + p.nu * vmid * vmid));
        }
        return worst;
    };
    const double e1 = run(1e-3, 20);
    const double e2 = run(5e-4, 20);  // halves the sample spacing too
    CHECK(e2 <= 0.75 * e1);
    CHECK(e2 >= 0.25 * e1);
    // and the residual itself stays below the inequality's right-hand side
    auto r = integrate_det(small_random(64), SpectralField(kGrid), p, cfg);
    CHECK(energy_residual_max(r.record) <= 1e-12);
}

TEST_CASE("contraction bound: trivial and specialization cases") {
    FluidParams p = params_basic(0.7);
    SolverConfig cfg{1e-3, 2.0, 50, 1e-8};

    SnapshotSeries sa, sb;
    integrate_det(small_random(65), SpectralField(kGrid), p, cfg, &sa, 2);
    integrate_det(small_random(65), SpectralField(kGrid), p, cfg, &sb, 2);
    auto same = contraction_check(sa, sb, p, 5);
    for (const auto& w : same) CHECK(w.observed_ratio == 0.0);  // identical trajectories

    // m1 = 0: bound reduces to exp(-nu eps0 lambda dt); the pair (0, m2)
    SnapshotSeries zs, ms;
    integrate_det(SpectralField(kGrid), SpectralField(kGrid), p, cfg, &zs, 2);
    integrate_det(small_random(66), SpectralField(kGrid), p, cfg, &ms, 2);
    auto win = contraction_check(zs, ms, p, 4);
    for (const auto& w : win) {
        CHECK(w.bound ==
              doctest::Approx(std::exp(-p.nu * p.eps0 * p.lambda * (w.t2 - w.t1))).epsilon(1e-12));
        CHECK(w.observed_ratio <= w.bound * 1.05);
    }

    SnapshotSeries bad = zs;
    bad.t.pop_back();
    bad.state.pop_back();
    bad.a_l4.pop_back();
    CHECK_THROWS_AS(contraction_check(bad, ms, p, 3), std::invalid_argument);
}

TEST_CASE("contraction bound holds for a forced pair") {
    FluidParams p = params_basic(0.7);
    SpectralField g = taylor_green(kGrid, 0.15);
    SolverConfig cfg{1e-3, 3.0, 50, 1e-8};
    SnapshotSeries sa, sb;
    integrate_det(small_random(67), g, p, cfg, &sa, 2);
    integrate_det(small_random(68), g, p, cfg, &sb, 2);
    auto windows = contraction_check(sa, sb, p, 10);
    CHECK(windows.size() == 10);
    for (const auto& w : windows) CHECK(w.observed_ratio <= w.bound * 1.05);
}

TEST_CASE("singleton finder: zero forcing decays to the origin") {
    FluidParams p = params_basic();
    // slowest mode decays like e^{-nu lambda t}; 0.25 e^{-16} is below 1e-7
    SolverConfig cfg{1e-3, 16.0, 100, 1e-7};
    std::vector<SpectralField> ics;
    for (int i = 0; i < 3; ++i) ics.push_back(small_random(70 + i, 0.25));
    SingletonResult r = find_singleton(SpectralField(kGrid), p, cfg, ics);
    CHECK(r.converged);
    CHECK(norm(r.a_star, NormKind::L2) <= cfg.steady_tol);
    CHECK(r.max_pairwise < cfg.steady_tol);
}

TEST_CASE("singleton finder: forced case with positive margin") {
    FluidParams p = params_basic(0.7);
    SpectralField g = taylor_green(kGrid, 0.2);
    CHECK(compute_rho(p, g) > 0.0);
    SolverConfig cfg{1e-3, 14.0, 100, 1e-6};
    std::vector<SpectralField> ics;
    for (int i = 0; i < 3; ++i) ics.push_back(small_random(80 + i));
    SingletonResult r = find_singleton(g, p, cfg, ics);
    CHECK(r.converged);
    CHECK(r.max_pairwise < cfg.steady_tol);
    CHECK(norm(r.a_star, NormKind::L2) > 0.01);  // genuinely forced steady state
}

TEST_CASE("identical initial conditions give bitwise identical runs") {
    FluidParams p = params_basic();
    SpectralField g = taylor_green(kGrid, 0.2);
    SolverConfig cfg{1e-3, 0.3, 30, 1e-8};
    auto a = integrate_det(small_random(90), g, p, cfg);
    auto b = integrate_det(small_random(90), g, p, cfg);
    for (int comp = 0; comp < 2; ++comp)
        for (std::size_t s = 0; s < a.final_state.c[comp].size(); ++s)
            CHECK(a.final_state.c[comp][s] == b.final_state.c[comp][s]);
}

TEST_CASE("absorbing entry is detected on a forced run") {
    FluidParams p = params_basic(0.7);
    SpectralField g = taylor_green(kGrid, 0.2);
    SolverConfig cfg{1e-3, 10.0, 100, 1e-8};
    // start OUTSIDE the absorbing ball to see a genuine entry
    SpectralField ic = small_random(91, 3.0);
    auto res = integrate_det(ic, g, p, cfg);
    const auto& r = res.record;
    REQUIRE(!std::isnan(r.absorbing_entry_time));
    const double gh = r.g_hm1;
    const double bound = gh * gh / (p.nu_star * p.nu_star * p.lambda);
    CHECK(r.l2.front() * r.l2.front() > bound);  // genuinely outside at t=0
    bool held = true;
    for (std::size_t i = 0; i < r.t.size(); ++i)
        if (r.t[i] >= r.absorbing_entry_time) held = held && r.absorb_lhs[i] <= bound * 1.05;
    CHECK(held);
}
