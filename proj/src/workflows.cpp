#include "tgf/workflows.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tgf/rng.hpp"

namespace tgf {

using ojson = nlohmann::ordered_json;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) {
        if (const char* env = std::getenv("TGF_THREADS")) threads = std::atoi(env);
        if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errs[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);  // lowest index first: deterministic
}

Prepared prepare(const RunConfig& cfg) {
    Prepared p;
    p.forcing = build_forcing(cfg);
    p.md = estimate_md(cfg.grid, cfg.md_trials,
                       rng::stream_key(cfg.master_seed, rng::Stream::MdTrial, 0xC0FFEE));
    p.params = make_params(cfg.nu, cfg.alpha, cfg.beta, cfg.grid.lambda_poincare(), p.md);
    p.rho = compute_rho(p.params, p.forcing);
    return p;
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
    std::string out = "t,l2,v,a_l4,energy_residual\n";
    for (std::size_t i = 0; i < rec.t.size(); ++i) {
        out += fmt_double(rec.t[i]) + "," + fmt_double(rec.l2[i]) + "," + fmt_double(rec.vnorm[i]) +
               "," + fmt_double(rec.a_l4[i]) + "," + fmt_double(rec.energy_residual[i]) + "\n";
    }
    return out;
}

// ---- the verify suite ---------------------------------------------------------

namespace {

SpectralField random_gradient_field(const GridSpec& g, std::uint64_t seed) {
    // grad of a random scalar potential; annihilated by the projector
    SpectralField f(g);
    const int km = g.kmax();
    const double k0 = g.kappa0();
    for (int kx = -km; kx <= km; ++kx)
        for (int ky = 0; ky <= km; ++ky) {
            if (ky == 0 && kx <= 0) continue;
            if (kx * kx + ky * ky > km * km) continue;
            double z0, z1;
            rng::gaussian_pair(rng::stream_key(seed, rng::Stream::FieldGen,
                                               static_cast<std::uint64_t>(std::int64_t(kx)),
                                               static_cast<std::uint64_t>(std::int64_t(ky)), 7),
                               0, z0, z1);
            const double amp = std::pow(double(kx * kx + ky * ky), -1.25);
            const cplx phi = amp * cplx(z0, z1);
            const cplx gx = cplx(0.0, k0 * kx) * phi;
            const cplx gy = cplx(0.0, k0 * ky) * phi;
            f.at(0, g.index_of(kx), g.index_of(ky)) = gx;
            f.at(1, g.index_of(kx), g.index_of(ky)) = gy;
            f.at(0, g.index_of(-kx), g.index_of(-ky)) = std::conj(gx);
            f.at(1, g.index_of(-kx), g.index_of(-ky)) = std::conj(gy);
        }
    return f;
}

SpectralField random_raw_field(const GridSpec& g, std::uint64_t seed) {
    SpectralField f = random_divfree_field(g, 2.5, seed);
    axpy(f, 0.7, random_gradient_field(g, seed ^ 0xABCDEFull));
    return f;
}

double quad_l2(const SpectralField& f) {
    PaddedTransform tr(f.grid);
    const std::size_t np = static_cast<std::size_t>(f.grid.pad()) * f.grid.pad();
    std::vector<double> p1(np), p2(np);
    tr.to_physical(f.c[0].data(), nullptr, p1.data(), f.c[1].data(), nullptr, p2.data());
    double s = 0.0;
    for (std::size_t i = 0; i < np; ++i) s += p1[i] * p1[i] + p2[i] * p2[i];
    const double h = f.grid.L / f.grid.pad();
    return std::sqrt(s * h * h);
}

// integral of Tr(A(m)^3) and the l1 scale of |A|^3
std::pair<double, double> trace_a_cubed(const SpectralField& m) {
    TensorField a = sym_grad(m);
    double tr3 = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.e[0].size(); ++i) {
        const double a11 = a.e[0][i], a12 = a.e[1][i], a21 = a.e[2][i], a22 = a.e[3][i];
        // Tr(A^3) for a symmetric 2x2 matrix
        tr3 += a11 * a11 * a11 + 3.0 * a11 * a12 * a21 + 3.0 * a12 * a21 * a22 + a22 * a22 * a22;
        scale += std::pow(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22, 1.5);
    }
    const double h = m.grid.L / m.grid.pad();
    return {tr3 * h * h, scale * h * h};
}

double l1_triple_scale(const SpectralField& p, const SpectralField& m, const SpectralField& u) {
    const GridSpec& g = m.grid;
    const SpectralTables& t = tables(g);
    PaddedTransform tr(g);
    const std::size_t np = static_cast<std::size_t>(g.pad()) * g.pad();
    std::vector<double> p1(np), p2(np), u1(np), u2(np), dx1(np), dy1(np), dx2(np), dy2(np);
    tr.to_physical(p.c[0].data(), nullptr, p1.data(), p.c[1].data(), nullptr, p2.data());
    tr.to_physical(u.c[0].data(), nullptr, u1.data(), u.c[1].data(), nullptr, u2.data());
    tr.to_physical(m.c[0].data(), t.ikx.data(), dx1.data(), m.c[0].data(), t.iky.data(), dy1.data());
    tr.to_physical(m.c[1].data(), t.ikx.data(), dx2.data(), m.c[1].data(), t.iky.data(), dy2.data());
    double s = 0.0;
    for (std::size_t i = 0; i < np; ++i)
        s += std::abs((p1[i] * dx1[i] + p2[i] * dy1[i]) * u1[i]) +
             std::abs((p1[i] * dx2[i] + p2[i] * dy2[i]) * u2[i]);
    const double h = g.L / g.pad();
    return s * h * h;
}

}  // namespace

std::vector<PropertyResult> verify_properties(const RunConfig& cfg) {
    std::vector<PropertyResult> out;
    const GridSpec& g = cfg.grid;
    const std::uint64_t seed = cfg.master_seed;
    auto push = [&](const std::string& name, double measured, double threshold, bool le = true) {
        PropertyResult r{name, le ? measured <= threshold : measured >= threshold, measured,
                         threshold};
        out.push_back(r);
    };

    const int nf = 100;

    {  // projector: idempotency and self-adjointness on raw fields
        double worst_idem = 0.0, worst_adj = 0.0, worst_grad = 0.0;
        for (int i = 0; i < nf; ++i) {
            SpectralField f = random_raw_field(g, rng::hash3(seed, 0x10, i));
            SpectralField pf = leray_project(f);
            SpectralField ppf = leray_project(pf);
            const double den = norm(pf, NormKind::L2);
            if (den > 0) worst_idem = std::max(worst_idem, norm(subbed(ppf, pf), NormKind::L2) / den);
            SpectralField h = random_raw_field(g, rng::hash3(seed, 0x11, i));
            const double lhs = l2_inner(pf, h), rhs = l2_inner(f, leray_project(h));
            worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / (norm(f, NormKind::L2) *
                                                                   norm(h, NormKind::L2)));
        }
        SpectralField gr = random_gradient_field(g, rng::hash3(seed, 0x12, 1));
        const double grn = norm(gr, NormKind::L2);
        worst_grad = norm(leray_project(gr), NormKind::L2) / (grn > 0 ? grn : 1.0);
        push("leray_idempotent_rel", worst_idem, 1e-14);
        push("leray_selfadjoint_rel", worst_adj, 1e-13);
        push("leray_annihilates_gradients_rel", worst_grad, 1e-13);
    }

    {  // Poincare with lambda = (2 pi / L)^2; equality on the lowest mode
        double worst = 0.0;
        const double lam = g.lambda_poincare();
        for (int i = 0; i < 50; ++i) {
            SpectralField m = random_divfree_field(g, 2.0, rng::hash3(seed, 0x13, i));
            const double l2 = norm(m, NormKind::L2), v = norm(m, NormKind::V);
            worst = std::max(worst, lam * l2 * l2 / (v * v));
        }
        push("poincare_ratio_max", worst, 1.0 + 1e-12);
        SpectralField low = field_from_modes(g, {{0, 0, 1, cplx(0.0, -0.5)}});
        const double l2 = norm(low, NormKind::L2), v = norm(low, NormKind::V);
        push("poincare_equality_lowest_mode", std::abs(lam * l2 * l2 - v * v) / (v * v), 1e-13);
    }

    double md = 0.0;
    {  // Sobolev-Korn chain with the estimated constant
        md = estimate_md(g, cfg.md_trials, rng::stream_key(seed, rng::Stream::MdTrial, 0xC0FFEE));
        double worst = 0.0;
        for (int i = 0; i < nf; ++i) {
            SpectralField m =
                random_divfree_field(g, 1.5 + 0.5 * (i % 4), rng::hash3(seed, 0x14, i));
            worst = std::max(worst, md_ratio(m));
        }
        push("sobolev_korn_ratio_vs_md", worst, md);
    }

    {  // trilinear form identities and the K-pairing
        double worst_bmm = 0.0, worst_skew = 0.0, worst_k = 0.0, worst_tr3 = 0.0;
        for (int i = 0; i < nf; ++i) {
            SpectralField p = random_divfree_field(g, 2.0, rng::hash3(seed, 0x15, i));
            SpectralField m = random_divfree_field(g, 2.0, rng::hash3(seed, 0x16, i));
            SpectralField u = random_divfree_field(g, 2.0, rng::hash3(seed, 0x17, i));
            const double scale_mm = l1_triple_scale(p, m, m);
            worst_bmm = std::max(worst_bmm, std::abs(trilinear_b(p, m, m)) / scale_mm);
            const double scale_mu =
                l1_triple_scale(p, m, u) + l1_triple_scale(p, u, m);
            worst_skew = std::max(
                worst_skew, std::abs(trilinear_b(p, m, u) + trilinear_b(p, u, m)) / scale_mu);
            const double a4 = norm(sym_grad(m), NormKind::L4);
            const double a44 = a4 * a4 * a4 * a4;
            worst_k = std::max(worst_k,
                               std::abs(l2_inner(apply_K(m), m) - 0.5 * a44) / a44);
            const auto [tr3, sc3] = trace_a_cubed(m);
            worst_tr3 = std::max(worst_tr3, std::abs(tr3) / sc3);
        }
        push("b_p_m_m_zero_rel", worst_bmm, 1e-12);
        push("b_antisymmetry_rel", worst_skew, 1e-12);
        push("k_pairing_rel", worst_k, 1e-11);
        push("trace_a_cubed_rel", worst_tr3, 1e-12);
    }

    {  // monotonicity sweeps at the three reference parameter triples
        const double triples[3][3] = {{1.0, 0.0, 1.0}, {1.0, 0.5, 1.0}, {0.5, 0.9, 1.0}};
        for (int c = 0; c < 3; ++c) {
            FluidParams p = make_params(triples[c][0], triples[c][1], triples[c][2],
                                        g.lambda_poincare(), md);
            double worst = 0.0;  // most negative normalized slack
            for (int i = 0; i < nf; ++i) {
                SpectralField m1 = random_divfree_field(g, 2.5, rng::hash4(seed, 0x18, c, i));
                SpectralField m2 = random_divfree_field(g, 2.5, rng::hash4(seed, 0x19, c, i));
                MonotonicityGap gap = monotonicity_gap(m1, m2, p);
                const double scale = std::abs(gap.lhs) + gap.rhs_l2 + gap.rhs_l4;
                worst = std::min(worst, gap.slack / scale);
            }
            std::ostringstream name;
            name << "monotonicity_slack_nu" << triples[c][0] << "_alpha" << triples[c][1] << "_beta"
                 << triples[c][2];
            push(name.str(), worst, -1e-10, false);
        }
    }

    {  // homogeneity of the four operators under m -> 2m
        SpectralField m = random_divfree_field(g, 2.5, rng::hash3(seed, 0x1A, 3));
        SpectralField m2 = m;
        scale(m2, 2.0);
        auto relgap = [](const SpectralField& a, const SpectralField& b, double floor_scale) {
            const double num = norm(subbed(a, b), NormKind::L2);
            const double den = std::max({norm(a, NormKind::L2), norm(b, NormKind::L2), floor_scale});
            return num / den;
        };
        SpectralField sa = op_stokes(m);
        scale(sa, 2.0);
        push("homogeneity_stokes_linear", relgap(op_stokes(m2), sa, 1e-300), 1e-12);
        SpectralField ba = apply_convection(m);
        scale(ba, 4.0);
        push("homogeneity_convection_quadratic", relgap(apply_convection(m2), ba, 1e-300), 1e-12);
        SpectralField ja = apply_J(m);
        scale(ja, 4.0);
        // J vanishes identically in 2D; measure its scaling defect against the
        // magnitude of the other quadratic term
        const double qscale = norm(ba, NormKind::L2);
        push("homogeneity_j_quadratic", relgap(apply_J(m2), ja, qscale), 1e-11, true);
        SpectralField ka = apply_K(m);
        scale(ka, 8.0);
        push("homogeneity_k_cubic", relgap(apply_K(m2), ka, 1e-300), 1e-11);
    }

    {  // Parseval vs padded quadrature
        SpectralField m = random_divfree_field(g, 2.0, rng::hash3(seed, 0x1B, 9));
        const double a = norm(m, NormKind::L2), b = quad_l2(m);
        push("parseval_vs_quadrature_rel", std::abs(a - b) / a, 1e-13);
    }

    {  // OU stationary variance, shift identity, determinism, temperedness
        NoiseSpec ns = cfg.noise;
        WienerPath path(ns, g, cfg.nu, 1.0, -10000, 0);
        OUState st = ou_stationary_init(path);
        const auto& modes = path.modes();
        std::vector<double> acc(modes.size(), 0.0);
        const int nsteps = 10000;
        for (int s = 0; s < nsteps; ++s) {
            ou_step(st, path, s, 1);
            for (std::size_t mI = 0; mI < modes.size(); ++mI) {
                const cplx a = st.q.at(0, g.index_of(modes[mI].kx), g.index_of(modes[mI].ky));
                const cplx b = st.q.at(1, g.index_of(modes[mI].kx), g.index_of(modes[mI].ky));
                acc[mI] += std::norm(a) + std::norm(b);
            }
        }
        double worst = 0.0;
        for (std::size_t mI = 0; mI < modes.size(); ++mI) {
            const double target = modes[mI].sigma * modes[mI].sigma / (2.0 * modes[mI].mu);
            worst = std::max(worst, std::abs(acc[mI] / nsteps - target) / target);
        }
        push("ou_stationary_variance_rel", worst, 0.05);

        // theta-shift compatibility: q(theta_s w, t) = q(w, t+s), grid-exact
        const double dtq = 0.01;
        WienerPath pa(ns, g, cfg.nu, dtq, -400, 0);
        WienerPath pb = shift_path(pa, -2.0);
        OUState qa = ou_stationary_init(pa);
        OUState qb = ou_stationary_init(pb);
        double worst_shift = 0.0;
        for (int s = 0; s < 400; ++s) {
            ou_step(qa, pa, s, 1);
            ou_step(qb, pb, s, 1);
        }
        worst_shift = norm(subbed(qa.q, qb.q), NormKind::L2);
        push("ou_shift_identity_abs", worst_shift, 0.0);

        WienerPath p1(ns, g, cfg.nu, dtq, -100, 0);
        WienerPath p2(ns, g, cfg.nu, dtq, -100, 0);
        double worst_det = 0.0;
        cplx w1[2], w2[2];
        for (int s = 0; s < 100; ++s)
            for (std::size_t mI = 0; mI < modes.size(); ++mI) {
                p1.increment(mI, s, w1);
                p2.increment(mI, s, w2);
                worst_det = std::max({worst_det, std::abs(w1[0] - w2[0]), std::abs(w1[1] - w2[1])});
            }
        push("path_determinism_abs", worst_det, 0.0);

        const TemperedCheck t1 = ou_tempered_check(ns, g, cfg.nu, 0.5, 12.0, 0.02);
        const TemperedCheck t2 = ou_tempered_check(ns, g, cfg.nu, 0.5, 24.0, 0.02);
        push("tempered_integral_stability_rel", std::abs(t2.integral - t1.integral) / t1.integral,
             0.01);
    }

    return out;
}

namespace {

ojson property_json(const PropertyResult& p) {
    ojson j;
    j["name"] = p.name;
    j["pass"] = p.pass;
    j["measured"] = p.measured;
    j["threshold"] = p.threshold;
    return j;
}

}  // namespace

WorkflowOutput run_verify(const RunConfig& cfg) {
    WorkflowOutput out;
    auto props = verify_properties(cfg);
    bool all = true;
    ojson report;
    report["properties"] = ojson::array();
    for (const auto& p : props) {
        report["properties"].push_back(property_json(p));
        all = all && p.pass;
    }
    report["all_pass"] = all;
    out.artifacts.push_back({"verify_report.json", report.dump(2) + "\n"});
    add_manifest(out.artifacts);
    out.exit_code = all ? 0 : 1;
    std::ostringstream s;
    s << "verify: " << props.size() << " properties, "
      << (all ? "all pass" : "FAILURES present");
    out.summary = s.str();
    return out;
}

WorkflowOutput run_simulate_det(const RunConfig& cfg) {
    WorkflowOutput out;
    Prepared prep = prepare(cfg);
    SpectralField ic = random_divfree_field(
        cfg.grid, 2.5, rng::stream_key(cfg.master_seed, rng::Stream::InitialCondition, 0));
    scale(ic, cfg.ic_amplitude);
    SolverConfig scfg{cfg.dt, cfg.t_end, cfg.monitor_stride, cfg.steady_tol};
    int exit_code = 0;
    std::string note;
    try {
        auto res = integrate_det(ic, prep.forcing, prep.params, scfg);
        out.artifacts.push_back({"traj.csv", trajectory_csv(res.record)});
        out.artifacts.push_back({"final_state.tgf", field_to_bytes(res.final_state)});
        ojson j;
        j["rho"] = prep.rho;
        j["md_estimate"] = prep.md;
        j["g_hm1"] = res.record.g_hm1;
        j["final_l2"] = res.record.l2.back();
        j["absorbing_entry_time"] =
            std::isnan(res.record.absorbing_entry_time) ? ojson(nullptr)
                                                        : ojson(res.record.absorbing_entry_time);
        j["dt_halvings"] = res.record.dt_halvings;
        j["dt_final"] = res.record.dt_final;
        out.artifacts.push_back({"summary.json", j.dump(2) + "\n"});
        note = "simulate-det: reached t_end, final l2 = " + fmt_double(res.record.l2.back());
    } catch (const BlowupError& e) {
        ojson j;
        j["blow_up"] = e.what();
        out.artifacts.push_back({"summary.json", j.dump(2) + "\n"});
        exit_code = 3;
        note = std::string("simulate-det: ") + e.what();
    }
    add_manifest(out.artifacts);
    out.exit_code = exit_code;
    out.summary = note;
    return out;
}

namespace {

std::vector<SpectralField> seeded_ics(const RunConfig& cfg, int n) {
    std::vector<SpectralField> ics;
    for (int i = 0; i < n; ++i) {
        SpectralField f = random_divfree_field(
            cfg.grid, 2.5, rng::stream_key(cfg.master_seed, rng::Stream::InitialCondition, i));
        scale(f, cfg.ic_amplitude);
        ics.push_back(std::move(f));
    }
    return ics;
}

}  // namespace

WorkflowOutput run_find_attractor(const RunConfig& cfg) {
    WorkflowOutput out;
    Prepared prep = prepare(cfg);
    std::string warn;
    if (prep.rho <= 0.0)
        warn = "warning: smallness margin rho <= 0; a singleton attractor is not guaranteed. ";
    SolverConfig scfg{cfg.dt, cfg.t_end, cfg.monitor_stride, cfg.steady_tol};
    SingletonResult res = find_singleton(prep.forcing, prep.params, scfg, seeded_ics(cfg, cfg.attractor_n_ics));
    out.artifacts.push_back({"a_star.tgf", field_to_bytes(res.a_star)});
    ojson j;
    j["rho"] = prep.rho;
    j["md_estimate"] = prep.md;
    j["g_hm1"] = norm(prep.forcing, NormKind::Hminus1);
    j["n_ics"] = cfg.attractor_n_ics;
    j["max_pairwise"] = res.max_pairwise;
    j["converged"] = res.converged;
    j["final_l2"] = res.final_l2;
    j["last_step_change"] = res.last_step_change;
    j["a_star_l2"] = norm(res.a_star, NormKind::L2);
    out.artifacts.push_back({"attractor_report.json", j.dump(2) + "\n"});
    add_manifest(out.artifacts);
    out.exit_code = res.converged ? 0 : 1;
    out.summary = warn + "find-attractor: max pairwise " + fmt_double(res.max_pairwise) +
                  (res.converged ? " (converged)" : " (NOT converged)");
    return out;
}

namespace {

double heuristic_horizon(const RunConfig& cfg, double rho) {
    if (rho > 0.0) return 4.0 / rho * std::log(1.0 / cfg.steady_tol);
    return 10.0;  // fallback when the smallness condition fails
}

double round_to_dt(double T, double dt) { return std::max<double>(1, std::ceil(T / dt)) * dt; }

AttractorSample probe_point(const RunConfig& cfg, const Prepared& prep,
                            const SpectralField& a_star, double T, double varsigma,
                            std::uint64_t seed) {
    NoiseSpec ns = cfg.noise;
    ns.master_seed = seed;
    const std::int64_t steps = std::llround(T / cfg.dt);
    WienerPath path(ns, cfg.grid, cfg.nu, cfg.dt, -steps, 0);
    return attractor_point(path, prep.forcing, prep.params, varsigma, steps * cfg.dt, cfg.dt,
                           cfg.pullback_n_ics, a_star, seed, nullptr, cfg.ic_amplitude);
}

}  // namespace

HorizonPick pick_horizon(const RunConfig& cfg, const Prepared& prep, const SpectralField& a_star,
                         double tol) {
    double T = cfg.pullback_horizon > 0.0 ? cfg.pullback_horizon
                                          : heuristic_horizon(cfg, prep.rho);
    T = round_to_dt(T, cfg.dt);
    const std::uint64_t probe_seed = rng::hash2(cfg.master_seed, 0x960BEull);
    HorizonPick pick;
    for (int iter = 0; iter < 4; ++iter) {
        AttractorSample a = probe_point(cfg, prep, a_star, T, cfg.noise.varsigma, probe_seed);
        AttractorSample b = probe_point(cfg, prep, a_star, 2.0 * T, cfg.noise.varsigma, probe_seed);
        pick.doubling_gap = norm(subbed(a.point, b.point), NormKind::L2);
        if (pick.doubling_gap < tol) break;
        T *= 2.0;
        ++pick.doublings;
    }
    pick.T = T;
    return pick;
}

WorkflowOutput run_pullback(const RunConfig& cfg) {
    WorkflowOutput out;
    Prepared prep = prepare(cfg);
    const double T = round_to_dt(cfg.pullback_horizon > 0.0 ? cfg.pullback_horizon
                                                            : heuristic_horizon(cfg, prep.rho),
                                 cfg.dt);
    NoiseSpec ns = cfg.noise;
    ns.master_seed = cfg.master_seed;
    const std::int64_t steps = std::llround(T / cfg.dt);
    WienerPath path(ns, cfg.grid, cfg.nu, cfg.dt, -steps, 0);
    TrajectoryRecord rec;
    PullbackResult pr =
        pullback_solve(path, seeded_ics(cfg, cfg.pullback_n_ics), prep.forcing, prep.params,
                       steps * cfg.dt, cfg.dt, cfg.noise.varsigma, nullptr, &rec,
                       cfg.monitor_stride);
    out.artifacts.push_back({"pullback_traj.csv", trajectory_csv(rec)});
    // mean over included endpoints is the pullback point estimate
    SpectralField point(cfg.grid);
    int included = 0;
    for (std::size_t i = 0; i < pr.finals.size(); ++i)
        if (std::find(pr.excluded.begin(), pr.excluded.end(), int(i)) == pr.excluded.end())
            ++included;
    for (std::size_t i = 0; i < pr.finals.size(); ++i)
        if (std::find(pr.excluded.begin(), pr.excluded.end(), int(i)) == pr.excluded.end())
            axpy(point, 1.0 / included, pr.finals[i]);
    out.artifacts.push_back({"pullback_point.tgf", field_to_bytes(point)});
    {
        std::ostringstream ps(std::ios::binary);
        save_path(ps, path);
        out.artifacts.push_back({"path.tgfw", ps.str()});
    }
    ojson j;
    j["seed"] = cfg.master_seed;
    j["varsigma"] = cfg.noise.varsigma;
    j["T"] = pr.T_used;
    j["dt"] = cfg.dt;
    j["n_ics"] = cfg.pullback_n_ics;
    j["excluded_ics"] = pr.excluded;
    j["max_pairwise"] = pr.max_pairwise;
    j["rho"] = prep.rho;
    out.artifacts.push_back({"pullback_report.json", j.dump(2) + "\n"});
    add_manifest(out.artifacts);
    out.exit_code = pr.excluded.empty() ? 0 : 3;
    out.summary = "pullback: spread " + fmt_double(pr.max_pairwise) + ", " +
                  std::to_string(pr.excluded.size()) + " exclusions";
    return out;
}

WorkflowOutput run_rate_study(const RunConfig& cfg) {
    WorkflowOutput out;
    Prepared prep = prepare(cfg);
    std::string warn;
    if (prep.rho <= 0.0) warn = "warning: rho <= 0, rate study not backed by the contraction theory. ";

    SolverConfig scfg{cfg.dt, cfg.t_end, cfg.monitor_stride, cfg.steady_tol};
    SingletonResult sing =
        find_singleton(prep.forcing, prep.params, scfg, seeded_ics(cfg, cfg.attractor_n_ics));
    if (!sing.converged) warn += "warning: singleton finder did not converge to steady_tol. ";

    HorizonPick pick = pick_horizon(cfg, prep, sing.a_star);
    const std::int64_t steps = std::llround(pick.T / cfg.dt);

    // discretization floor: the varsigma = 0 pullback should land on a_star
    AttractorSample floor_probe = probe_point(cfg, prep, sing.a_star, pick.T, 0.0,
                                              rng::hash2(cfg.master_seed, 0xF100Full));
    const double floor_estimate = floor_probe.distance_to_astar;

    std::vector<double> vs = cfg.rate_varsigmas;
    std::sort(vs.begin(), vs.end(), std::greater<double>());
    const int nseeds = cfg.rate_seeds;
    std::vector<AttractorSample> samples(vs.size() * nseeds, AttractorSample{});

    parallel_for(nseeds, cfg.threads, [&](int s) {
        NoiseSpec ns = cfg.noise;
        ns.master_seed = rng::hash3(cfg.master_seed, 0x5EED, s);
        WienerPath path(ns, cfg.grid, cfg.nu, cfg.dt, -steps, 0);
        QTrajectory qtr = ou_trajectory(path, 1);
        for (std::size_t v = 0; v < vs.size(); ++v) {
            samples[v * nseeds + s] =
                attractor_point(path, prep.forcing, prep.params, vs[v], steps * cfg.dt, cfg.dt,
                                cfg.pullback_n_ics, sing.a_star, ns.master_seed, &qtr,
                                cfg.ic_amplitude);
        }
    });

    RateStudyResult fit = rate_fit(samples, floor_estimate);

    std::string csv = "varsigma,seed,distance,spread,excluded\n";
    for (std::size_t v = 0; v < vs.size(); ++v)
        for (int s = 0; s < nseeds; ++s) {
            const AttractorSample& a = samples[v * nseeds + s];
            csv += fmt_double(a.varsigma) + "," + std::to_string(s) + "," +
                   fmt_double(a.distance_to_astar) + "," + fmt_double(a.spread) + "," +
                   (a.excluded ? "1" : "0") + "\n";
        }
    out.artifacts.push_back({"rate_study.csv", std::move(csv)});
    out.artifacts.push_back({"a_star.tgf", field_to_bytes(sing.a_star)});

    ojson j;
    j["delta_hat"] = fit.delta_hat;
    j["prefactor"] = fit.prefactor;
    j["ratio_series"] = fit.ratio_series;
    j["ratio_violation"] = fit.ratio_violation;
    j["below_resolution"] = fit.below_resolution;
    j["total_excluded"] = fit.total_excluded;
    j["T"] = pick.T;
    j["doubling_gap"] = pick.doubling_gap;
    j["doublings"] = pick.doublings;
    j["floor_estimate"] = floor_estimate;
    j["rho"] = prep.rho;
    j["md_estimate"] = prep.md;
    j["a_star_l2"] = norm(sing.a_star, NormKind::L2);
    j["groups"] = ojson::array();
    for (const auto& gr : fit.groups) {
        ojson gj;
        gj["varsigma"] = gr.varsigma;
        gj["mean"] = gr.mean;
        gj["median"] = gr.median;
        gj["max"] = gr.max;
        gj["n_seeds"] = gr.n_seeds;
        gj["excluded"] = gr.excluded;
        gj["below_floor"] = gr.below_floor;
        j["groups"].push_back(gj);
    }
    out.artifacts.push_back({"rate_summary.json", j.dump(2) + "\n"});
    add_manifest(out.artifacts);
    out.exit_code = fit.total_excluded == 0 ? 0 : 3;
    out.summary = warn + "rate-study: delta_hat = " + fmt_double(fit.delta_hat) +
                  ", ratio_violation = " + (fit.ratio_violation ? "true" : "false") +
                  ", exclusions = " + std::to_string(fit.total_excluded);
    return out;
}

}  // namespace tgf
