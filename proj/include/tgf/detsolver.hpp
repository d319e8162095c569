#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "tgf/operators.hpp"

namespace tgf {

/// Thrown when a state stops being finite; carries the failing step.
struct BlowupError : std::runtime_error {
    double t;
    long step;
    BlowupError(double t_, long step_)
        : std::runtime_error("solution blew up at t = " + std::to_string(t_) + " (step " +
                             std::to_string(step_) + ")"),
          t(t_),
          step(step_) {}
};

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    int monitor_stride = 100;  // steps between diagnostic samples
    double steady_tol = 1e-8;
};

struct TrajectoryRecord {
    std::vector<double> t, l2, vnorm, a_l4, energy_residual, absorb_lhs;
    double absorbing_entry_time = std::numeric_limits<double>::quiet_NaN();
    double g_hm1 = 0.0;              // ||g||_{H^-1} of the run
    int dt_halvings = 0;             // CFL guard events
    double dt_final = 0.0;
    double last_sample_change = 0.0; // ||m(t_end) - m(previous sample)||_2
};

/// One IMEX step shared by the deterministic and transformed systems:
///   z <- e^{-nu |k|^2 dt} (z + dt (N(w) + coef*extra)) + (exact response of P g)
/// with N(w) = -B(w) - alpha J(w) - beta K(w).
class ImexCore {
  public:
    ImexCore(const GridSpec& g, const FluidParams& p, const SpectralField& forcing, double dt);

    void set_dt(double dt);
    double dt() const { return dt_; }
    const FluidParams& params() const { return p_; }

    /// w is where the nonlinearity is evaluated (w == z for the plain system).
    /// extra may be null.
    void step(SpectralField& z, const SpectralField& w, const SpectralField* extra, double coef);

    double last_a_linf() const { return nl_.last_a_linf(); }

  private:
    GridSpec g_;
    FluidParams p_;
    SpectralField forcing_;  // P g
    double dt_ = 0.0;
    std::vector<double> damp_;
    SpectralField gresp_;
    NonlinearTerms nl_;
    SpectralField conv_, jt_, kt_;
    long steps_done_ = 0;
};

/// Single deterministic IMEX step (operation-level entry point).
SpectralField step_det(const SpectralField& m, const SpectralField& g, const FluidParams& p,
                       double dt);

/// Accumulates the per-sample diagnostics of a run (norms, energy residual,
/// absorbing-bound bookkeeping).  Shared by the deterministic and stochastic
/// integrators.
class TrajectoryMonitor {
  public:
    TrajectoryMonitor(const FluidParams& p, double g_hm1);
    void sample(TrajectoryRecord& rec, double t, const SpectralField& m);

  private:
    FluidParams p_;
    double g_scale_ = 0.0;  // ||g||^2 / (2 nu*)
    double p_rate_ = 0.0;   // discount rate nu* lambda
    double bound_ = 0.0;    // ||g||^2 / (nu* p)
    double integral_ = 0.0;
    double entry_candidate_ = std::numeric_limits<double>::quiet_NaN();
};

struct SnapshotSeries {
    std::vector<double> t;
    std::vector<SpectralField> state;
    std::vector<double> a_l4;
};

struct IntegrateResult {
    SpectralField final_state;
    TrajectoryRecord record;
};

/// Integrates to t_end recording diagnostics every monitor_stride steps.
/// A CFL-like guard dt*beta*||A||_inf^2 <= 0.1 halves dt (and doubles the
/// stride) when violated.  Snapshots, if requested, are taken every
/// snap_every samples.
IntegrateResult integrate_det(const SpectralField& m0, const SpectralField& g,
                              const FluidParams& p, const SolverConfig& cfg,
                              SnapshotSeries* snaps = nullptr, int snap_every = 1);

/// Max over samples (from sample index `from`) of the discrete residual of the
/// energy inequality:
///   FD d/dt ||m||_2^2 + (nu*/2) ||A||_2^2 + beta* ||A||_4^4 - ||g||^2_{H^-1}/(2 nu*).
double energy_residual_max(const TrajectoryRecord& r, std::size_t from = 1);

struct ContractionWindow {
    double t1 = 0.0, t2 = 0.0;
    double observed_ratio = 0.0;  // ||d(t2)||^2 / ||d(t1)||^2
    double bound = 0.0;           // exp{-nu eps0 lambda (t2-t1) + (M^2/2 nu eps0) int ||A(m1)||_4^2}
};

/// Splits the common time range into n_windows windows; m1 in the bound is
/// the trajectory with the smaller time-averaged ||A||_4^2.
std::vector<ContractionWindow> contraction_check(const SnapshotSeries& a, const SnapshotSeries& b,
                                                 const FluidParams& p, int n_windows);

struct SingletonResult {
    SpectralField a_star;
    double max_pairwise = 0.0;
    bool converged = false;
    std::vector<double> final_l2;
    std::vector<double> last_step_change;  // ||m(t_end) - m(previous sample)||_2 per IC
};

/// Integrates every initial condition to t_end; converged iff all pairwise
/// terminal distances and all last-sample changes are below steady_tol.
/// a_star is the mean of the terminal states.
SingletonResult find_singleton(const SpectralField& g, const FluidParams& p,
                               const SolverConfig& cfg, const std::vector<SpectralField>& ics);

}  // namespace tgf
