#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>

#include "tgf/workflows.hpp"

using namespace tgf;

namespace {
RunConfig small_cfg() {
    RunConfig c;
    c.grid = {16, kTwoPi / 2.0, 2};
    c.nu = 1.0;
    c.alpha = 0.0;
    c.beta = 1.0;
    c.forcing_preset = "taylor-green";
    c.forcing_amplitude = 0.3;
    c.noise.sigma0 = 0.05;
    c.noise.k_cut = 4;
    c.dt = 2e-3;
    c.t_end = 4.0;
    c.monitor_stride = 50;
    c.master_seed = 9;
    c.md_trials = 100;
    c.attractor_n_ics = 2;
    c.pullback_n_ics = 2;
    c.pullback_horizon = 3.0;
    return c;
}

std::string find_artifact(const ArtifactSet& set, const std::string& name) {
    for (const auto& a : set)
        if (a.name == name) return a.bytes;
    return {};
}
}  // namespace

TEST_CASE("config text parsing") {
    RunConfig c = parse_config_text(
        "# comment\n"
        "grid.n = 16\n"
        "grid.length = 3.141592653589793\n"
        "params.nu = 2.0\n"
        "params.alpha = 0.5\n"
        "params.beta = 1.5\n"
        "forcing.preset = taylor-green\n"
        "forcing.amplitude = 0.25   # trailing comment\n"
        "noise.k_cut = 3\n"
        "rate.varsigmas = 0.4, 0.2, 0.1\n"
        "run.master_seed = 42\n");
    CHECK(c.grid.n == 16);
    CHECK(c.nu == 2.0);
    CHECK(c.alpha == 0.5);
    CHECK(c.forcing_amplitude == 0.25);
    CHECK(c.noise.k_cut == 3);
    CHECK(c.rate_varsigmas == std::vector<double>{0.4, 0.2, 0.1});
    CHECK(c.master_seed == 42);
}

TEST_CASE("config JSON parsing, nested and flat") {
    RunConfig a = parse_config_text(R"({"grid": {"n": 16, "length": 3.141592653589793},
        "params": {"nu": 1.0, "alpha": 0.0, "beta": 1.0}, "noise": {"k_cut": 3}})");
    CHECK(a.grid.n == 16);
    RunConfig b = parse_config_text(R"({"grid.n": 16, "params.nu": 2.5, "noise.k_cut": 3})");
    CHECK(b.nu == 2.5);
}

TEST_CASE("config diagnostics name the offending key") {
    CHECK_THROWS_WITH_AS(parse_config_text("grid.m = 16\n"), doctest::Contains("grid.m"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("grid.n = banana\n"), doctest::Contains("grid.n"),
                         ConfigError);
    CHECK_THROWS_AS(parse_config_text("grid.n 16\n"), ConfigError);
    // the admissibility gate cites the constraint
    CHECK_THROWS_WITH_AS(
        parse_config_text("params.nu = 1\nparams.alpha = 10\nparams.beta = 1\n"),
        doctest::Contains("sqrt(2*nu*beta)"), ConfigError);
    // noise band wider than the retained grid band
    CHECK_THROWS_AS(parse_config_text("grid.n = 16\nnoise.k_cut = 8\n"), ConfigError);
}

TEST_CASE("config round trip through the canonical dump") {
    RunConfig c = small_cfg();
    RunConfig d = parse_config_text(config_to_text(c));
    CHECK(d.grid.n == c.grid.n);
    CHECK(d.grid.L == c.grid.L);
    CHECK(d.forcing_amplitude == c.forcing_amplitude);
    CHECK(d.rate_varsigmas == c.rate_varsigmas);
    CHECK(d.master_seed == c.master_seed);
}

TEST_CASE("verify suite passes on the default configuration") {
    RunConfig c;  // defaults: n = 32, L = 2 pi
    c.md_trials = 100;
    auto props = verify_properties(c);
    CHECK(props.size() >= 12);
    for (const auto& p : props) {
        CAPTURE(p.name);
        CAPTURE(p.measured);
        CHECK(p.pass);
    }
}

TEST_CASE("run_verify emits a report and a manifest") {
    RunConfig c;
    c.md_trials = 100;
    WorkflowOutput out = run_verify(c);
    CHECK(out.exit_code == 0);
    const std::string rep = find_artifact(out.artifacts, "verify_report.json");
    CHECK(!rep.empty());
    CHECK(rep.find("\"all_pass\": true") != std::string::npos);
    const std::string man = find_artifact(out.artifacts, "manifest.json");
    CHECK(man.find("verify_report.json") != std::string::npos);
    CHECK(man.find("sha256") != std::string::npos);
}

TEST_CASE("simulate-det artifacts are byte-reproducible") {
    RunConfig c = small_cfg();
    c.t_end = 0.5;
    WorkflowOutput a = run_simulate_det(c);
    WorkflowOutput b = run_simulate_det(c);
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
        CHECK(a.artifacts[i].name == b.artifacts[i].name);
        CHECK(a.artifacts[i].bytes == b.artifacts[i].bytes);
    }
    const std::string csv = find_artifact(a.artifacts, "traj.csv");
    CHECK(csv.rfind("t,l2,v,a_l4,energy_residual\n", 0) == 0);
    CHECK(a.exit_code == 0);
}

TEST_CASE("find-attractor converges on a small forced box") {
    RunConfig c = small_cfg();
    c.t_end = 6.0;
    c.steady_tol = 1e-7;
    WorkflowOutput out = run_find_attractor(c);
    CHECK(out.exit_code == 0);
    const std::string rep = find_artifact(out.artifacts, "attractor_report.json");
    CHECK(rep.find("\"converged\": true") != std::string::npos);
    CHECK(!find_artifact(out.artifacts, "a_star.tgf").empty());
}

TEST_CASE("pullback workflow emits trajectory, point and report") {
    RunConfig c = small_cfg();
    WorkflowOutput out = run_pullback(c);
    CHECK(out.exit_code == 0);
    CHECK(!find_artifact(out.artifacts, "pullback_traj.csv").empty());
    CHECK(!find_artifact(out.artifacts, "pullback_point.tgf").empty());
    const std::string rep = find_artifact(out.artifacts, "pullback_report.json");
    CHECK(rep.find("\"excluded_ics\": []") != std::string::npos);
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parallel_for visits every index and propagates errors") {
    std::vector<int> hits(1000, 0);
    parallel_for(1000, 4, [&](int i) { hits[i] = i + 1; });
    for (int i = 0; i < 1000; ++i) CHECK(hits[i] == i + 1);
    CHECK_THROWS_AS(parallel_for(10, 4,
                                 [&](int i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("fmt_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 6.283185307179586, 1e-300, 0.0}) {
        CHECK(std::stod(fmt_double(v)) == v);
    }
}
