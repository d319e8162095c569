#pragma once

#include "tgf/rdsolver.hpp"

namespace tgf {

struct HausdorffResult {
    double d_ab = 0.0;  // sup_{x in A} inf_{y in B} ||x-y||_2
    double d_ba = 0.0;
    double d_h = 0.0;   // max of the two
};

HausdorffResult hausdorff_dist(const std::vector<SpectralField>& A,
                               const std::vector<SpectralField>& B);

/// Pullback sample of the random attractor for one noise path.
struct AttractorSample {
    std::uint64_t omega_seed = 0;
    double varsigma = 0.0;
    SpectralField point;             // mean of the pullback limits over the ICs
    double spread = 0.0;             // max pairwise distance across ICs at time 0
    double distance_to_astar = 0.0;  // L2 distance to the deterministic singleton
    bool excluded = false;           // every IC blew up
    int excluded_ics = 0;
};

/// Pullback solve over n_ics initial conditions (a_star plus seeded random
/// fields of the given amplitude); records spread and distance to a_star.
AttractorSample attractor_point(const WienerPath& path, const SpectralField& g,
                                const FluidParams& p, double varsigma, double T, double dt,
                                int n_ics, const SpectralField& a_star, std::uint64_t seed,
                                const QTrajectory* qtr = nullptr, double ic_amplitude = 0.5);

/// gamma-estimate ||z(0) - a_star||_2^2 / varsigma^{4/3} from a pullback solve
/// of the transformed system against the deterministic solution on the same
/// horizon.  Rejects varsigma = 0.
double perturbation_radius(const SpectralField& g, const FluidParams& p, const WienerPath& path,
                           double varsigma, double T, double dt, const SpectralField& a_star);

struct RateGroup {
    double varsigma = 0.0;
    double mean = 0.0, median = 0.0, max = 0.0;
    int n_seeds = 0;
    int excluded = 0;
    bool below_floor = false;  // mean within 20x of the discretization floor
};

struct RateStudyResult {
    std::vector<RateGroup> groups;  // varsigma strictly decreasing
    double delta_hat = 0.0;         // least-squares slope of log mean vs log varsigma
    double prefactor = 0.0;
    std::vector<double> ratio_series;  // mean / varsigma^{2/3}, same order as groups
    bool ratio_violation = false;      // ratio grew by > 25% from largest to smallest varsigma
    bool below_resolution = false;     // all distances at resolution zero; no fit possible
    int total_excluded = 0;
};

/// Log-log least squares over >= 3 varsigma groups with >= 20 seeds each.
RateStudyResult rate_fit(const std::vector<AttractorSample>& samples, double floor_estimate = 0.0);

}  // namespace tgf
