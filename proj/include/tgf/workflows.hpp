#pragma once

#include <functional>

#include "tgf/artifacts.hpp"
#include "tgf/attract.hpp"
#include "tgf/config.hpp"

namespace tgf {

struct PropertyResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct WorkflowOutput {
    ArtifactSet artifacts;
    int exit_code = 0;
    std::string summary;  // human-readable one-paragraph outcome
};

/// Everything the simulation workflows share: forcing, validated parameters
/// with the estimated Sobolev-Korn constant, and the smallness margin.
struct Prepared {
    SpectralField forcing;
    FluidParams params;
    double md = 0.0;
    double rho = 0.0;
};
Prepared prepare(const RunConfig& cfg);

WorkflowOutput run_verify(const RunConfig& cfg);
WorkflowOutput run_simulate_det(const RunConfig& cfg);
WorkflowOutput run_find_attractor(const RunConfig& cfg);
WorkflowOutput run_pullback(const RunConfig& cfg);
WorkflowOutput run_rate_study(const RunConfig& cfg);

/// The invariant suite behind `verify`, exposed for tests.
std::vector<PropertyResult> verify_properties(const RunConfig& cfg);

/// Pullback horizon selection: starts from the configured horizon (or the
/// 4/rho ln(1/steady_tol) heuristic), then doubles until the attractor point
/// of a probe path moves by less than tol under horizon doubling.
struct HorizonPick {
    double T = 0.0;
    double doubling_gap = 0.0;
    int doublings = 0;
};
HorizonPick pick_horizon(const RunConfig& cfg, const Prepared& prep, const SpectralField& a_star,
                         double tol = 1e-6);

/// Deterministic thread map: runs fn(i) for i in [0, n) on up to `threads`
/// workers (0 = TGF_THREADS or hardware); results must be written by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

std::string trajectory_csv(const TrajectoryRecord& rec);

}  // namespace tgf
