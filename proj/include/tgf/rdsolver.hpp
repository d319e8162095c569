#pragma once

#include "tgf/detsolver.hpp"
#include "tgf/noise.hpp"

namespace tgf {

/// Transformed state of the pathwise random PDE.
struct StoState {
    SpectralField z;   // Z^varsigma
    OUState q;
    double varsigma = 0.0;
    double t = 0.0;
    std::int64_t j = 0;  // local base-step index on the driving path
};

/// z = m - varsigma q  (and back).  Affine, grid-checked, bitwise involutive.
SpectralField doss_sussmann(const SpectralField& m, const OUState& q, double varsigma);
SpectralField doss_sussmann_inverse(const SpectralField& z, const OUState& q, double varsigma);

/// IMEX stepper for dZ/dt = -nu A Z - B(Z+vq) - alpha J(Z+vq) - beta K(Z+vq)
/// + v q + P g, advancing the OU state on the same path.  At varsigma = 0 the
/// update is bitwise the deterministic step.
class RpdeStepper {
  public:
    RpdeStepper(const GridSpec& g, const FluidParams& p, const SpectralField& forcing, double dt,
                const WienerPath& path);

    int agg() const { return agg_; }
    double dt() const { return dt_; }

    void step(StoState& st);

    /// One transformed step with an externally supplied OU value (used when the
    /// OU trajectory is precomputed and shared across integrations).
    void step_with_q(SpectralField& z, const SpectralField& qf, double varsigma);

    /// Direct Euler-Maruyama IMEX step of the untransformed system (cross-check
    /// route): m <- damp (m + dt N(m) + varsigma dW) + g-response.
    void em_step(SpectralField& m, std::int64_t j_local, double varsigma);

  private:
    const WienerPath& path_;
    ImexCore core_;
    double dt_;
    int agg_;
    SpectralField w_, dw_;
};

/// Single-step entry points.
StoState step_rpde(const StoState& st, const SpectralField& g, const FluidParams& p, double dt,
                   const WienerPath& path);
SpectralField em_direct_step(const SpectralField& m, const SpectralField& g, const FluidParams& p,
                             double dt, const WienerPath& path, std::int64_t j_local,
                             double varsigma);

struct PullbackResult {
    std::vector<SpectralField> finals;  // m(0) = z(0) + varsigma q(0) per IC (excluded: zero field)
    std::vector<int> excluded;          // IC indices that blew up
    double max_pairwise = 0.0;          // over included finals
    double T_used = 0.0;
};

/// Integrates every IC from local time -T to 0 along the fixed path.
/// dt must be an integer multiple of the path's base step and T a multiple of
/// dt inside the path window.  The OU trajectory may be precomputed and shared
/// (it does not depend on varsigma or the IC).
PullbackResult pullback_solve(const WienerPath& path, const std::vector<SpectralField>& ics,
                              const SpectralField& g, const FluidParams& p, double T, double dt,
                              double varsigma, const QTrajectory* qtr = nullptr,
                              TrajectoryRecord* record_first = nullptr, int record_stride = 1);

}  // namespace tgf
