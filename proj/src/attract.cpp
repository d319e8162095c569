#include "tgf/attract.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tgf/rng.hpp"

namespace tgf {

HausdorffResult hausdorff_dist(const std::vector<SpectralField>& A,
                               const std::vector<SpectralField>& B) {
    if (A.empty() || B.empty()) throw std::invalid_argument("hausdorff_dist: empty point set");
    auto semi = [](const std::vector<SpectralField>& X, const std::vector<SpectralField>& Y) {
        double sup = 0.0;
        for (const auto& x : X) {
            double inf = std::numeric_limits<double>::infinity();
            for (const auto& y : Y) inf = std::min(inf, norm(subbed(x, y), NormKind::L2));
            sup = std::max(sup, inf);
        }
        return sup;
    };
    HausdorffResult r;
    r.d_ab = semi(A, B);
    r.d_ba = semi(B, A);
    r.d_h = std::max(r.d_ab, r.d_ba);
    return r;
}

AttractorSample attractor_point(const WienerPath& path, const SpectralField& g,
                                const FluidParams& p, double varsigma, double T, double dt,
                                int n_ics, const SpectralField& a_star, std::uint64_t seed,
                                const QTrajectory* qtr, double ic_amplitude) {
    if (n_ics < 1) throw std::invalid_argument("attractor_point: need at least one IC");
    const GridSpec& grid = path.grid();
    std::vector<SpectralField> ics;
    ics.push_back(a_star);
    for (int i = 1; i < n_ics; ++i) {
        SpectralField f = random_divfree_field(
            grid, 2.5, rng::stream_key(seed, rng::Stream::InitialCondition, i));
        scale(f, ic_amplitude);
        ics.push_back(std::move(f));
    }
    PullbackResult pr = pullback_solve(path, ics, g, p, T, dt, varsigma, qtr);
    AttractorSample s;
    s.omega_seed = seed;
    s.varsigma = varsigma;
    s.spread = pr.max_pairwise;
    s.excluded_ics = static_cast<int>(pr.excluded.size());
    if (s.excluded_ics == n_ics) {
        s.excluded = true;
        s.point = SpectralField(grid);
        return s;
    }
    s.point = SpectralField(grid);
    int included = 0;
    for (std::size_t i = 0; i < pr.finals.size(); ++i) {
        if (std::find(pr.excluded.begin(), pr.excluded.end(), int(i)) != pr.excluded.end()) continue;
        ++included;
    }
    for (std::size_t i = 0; i < pr.finals.size(); ++i) {
        if (std::find(pr.excluded.begin(), pr.excluded.end(), int(i)) != pr.excluded.end()) continue;
        axpy(s.point, 1.0 / included, pr.finals[i]);
    }
    s.distance_to_astar = norm(subbed(s.point, a_star), NormKind::L2);
    return s;
}

double perturbation_radius(const SpectralField& g, const FluidParams& p, const WienerPath& path,
                           double varsigma, double T, double dt, const SpectralField& a_star) {
    if (!(varsigma > 0.0))
        throw std::invalid_argument("perturbation_radius: requires varsigma > 0");
    const GridSpec& grid = path.grid();
    // a generic initial datum shared by both routes
    SpectralField psi = a_star;
    {
        SpectralField r = random_divfree_field(
            grid, 2.5, rng::stream_key(path.spec().master_seed, rng::Stream::InitialCondition, 777));
        scale(r, 0.5);
        axpy(psi, 1.0, r);
    }
    // transformed route on the pullback horizon
    PullbackResult pr = pullback_solve(path, {psi}, g, p, T, dt, varsigma);
    if (!pr.excluded.empty()) throw BlowupError(0.0, -1);
    // m(0) = z(0) + vq(0); recover z(0)
    QTrajectory qtr = ou_trajectory(path, static_cast<int>(std::llround(dt / path.dt_base())));
    SpectralField qf(grid);
    q_to_field(path, qtr.at(qtr.n_samples - 1), qf);
    SpectralField z0 = pr.finals[0];
    axpy(z0, -varsigma, qf);
    // deterministic route from the same datum; lands on a_star up to steady_tol
    SolverConfig det;
    det.dt = dt;
    det.t_end = T;
    det.monitor_stride = std::max(1, int(std::llround(T / dt)) / 8);
    auto detres = integrate_det(psi, g, p, det);
    const double det_gap = norm(subbed(detres.final_state, a_star), NormKind::L2);
    (void)det_gap;  // diagnostic; a_star is the steady reference below
    const double u = norm(subbed(z0, a_star), NormKind::L2);
    return u * u / std::pow(varsigma, 4.0 / 3.0);
}

RateStudyResult rate_fit(const std::vector<AttractorSample>& samples, double floor_estimate) {
    std::map<double, std::vector<const AttractorSample*>, std::greater<double>> by_vs;
    for (const auto& s : samples) by_vs[s.varsigma].push_back(&s);
    if (by_vs.size() < 3)
        throw std::invalid_argument("rate_fit: need at least 3 varsigma grid points");
    RateStudyResult out;
    bool any_positive = false;
    for (const auto& [vs, group] : by_vs) {
        if (group.size() < 20)
            throw std::invalid_argument("rate_fit: need at least 20 seeds per varsigma");
        RateGroup g;
        g.varsigma = vs;
        std::vector<double> d;
        for (const auto* s : group) {
            if (s->excluded) {
                ++g.excluded;
                continue;
            }
            d.push_back(s->distance_to_astar);
        }
        g.n_seeds = static_cast<int>(group.size());
        out.total_excluded += g.excluded;
        if (d.empty()) {
            out.groups.push_back(g);
            out.ratio_series.push_back(0.0);
            continue;
        }
        std::sort(d.begin(), d.end());
        g.max = d.back();
        g.median = d[d.size() / 2];
        for (double x : d) g.mean += x;
        g.mean /= d.size();
        g.below_floor = floor_estimate > 0.0 && g.mean < 20.0 * floor_estimate;
        if (g.mean > 0.0) any_positive = true;
        out.groups.push_back(g);
        out.ratio_series.push_back(g.mean / std::pow(vs, 2.0 / 3.0));
    }
    if (!any_positive) {
        out.below_resolution = true;
        return out;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& g : out.groups) {
        if (!(g.mean > 0.0)) continue;
        const double x = std::log(g.varsigma), y = std::log(g.mean);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double xbar = sx / n, ybar = sy / n;
    out.delta_hat = (sxy - n * xbar * ybar) / (sxx - n * xbar * xbar);
    out.prefactor = std::exp(ybar - out.delta_hat * xbar);
    if (out.ratio_series.size() >= 2 && out.ratio_series.front() > 0.0)
        out.ratio_violation = out.ratio_series.back() > 1.25 * out.ratio_series.front();
    return out;
}

}  // namespace tgf
