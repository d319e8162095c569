#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tgf/field.hpp"
#include "tgf/operators.hpp"

namespace tgf {

/// Spectral noise law: per-mode amplitude sigma_k = sigma0 |k|^{-decay_s} on
/// integer modes 0 < |k| <= k_cut.  decay_s >= 3 keeps sampled paths with
/// grid-stable W^{1,4}-type norms.
struct NoiseSpec {
    double sigma0 = 0.5;
    double decay_s = 3.0;
    int k_cut = 4;
    double varsigma = 0.2;  // global intensity, in (0, 1]
    std::uint64_t master_seed = 1;
};

void validate(const NoiseSpec& s);

struct DrivenMode {
    int kx = 0, ky = 0;
    double sigma = 0.0;  // sigma_k
    double mu = 0.0;     // nu |kappa|^2 + 1
};

/// Two-sided Brownian path on a uniform base grid, realized lazily: each
/// per-mode increment is a pure function of (master_seed, kx, ky, absolute
/// step index), so storage is O(1), disjoint windows are independent, the
/// shift theta_t is an integer re-anchoring, and refining dt by aggregation
/// keeps coarse increments consistent with fine ones.
class WienerPath {
  public:
    WienerPath(const NoiseSpec& spec, const GridSpec& grid, double nu, double dt_base,
               std::int64_t j_begin_abs, std::int64_t j_end_abs, std::int64_t shift_steps = 0);

    const NoiseSpec& spec() const { return spec_; }
    const GridSpec& grid() const { return grid_; }
    double nu() const { return nu_; }
    double dt_base() const { return dtb_; }
    std::int64_t n_steps() const { return je_ - jb_; }
    std::int64_t shift_steps() const { return shift_; }
    std::int64_t abs_begin() const { return jb_; }
    double t_begin() const { return (jb_ - shift_) * dtb_; }
    double t_end() const { return (je_ - shift_) * dtb_; }
    const std::vector<DrivenMode>& modes() const { return modes_; }

    /// Projected increment of mode m over base step j (local index in
    /// [0, n_steps()) ), written to w[2].
    void increment(std::size_t m, std::int64_t j_local, cplx w[2]) const;

    /// Projected unit-variance auxiliary normal for the conditionally-exact
    /// OU convolution, attached to (mode, base step).
    void aux_gaussian(std::size_t m, std::int64_t j_local, cplx w[2]) const;

    /// Stationary OU draw for mode m keyed by absolute step index j_abs.
    void stationary_draw(std::size_t m, std::int64_t j_abs, cplx w[2]) const;

    std::int64_t to_abs(std::int64_t j_local) const { return jb_ + j_local; }

    /// Cumulative path value at local grid time index (anchored to 0 at the
    /// local time origin when it lies inside the window, else at t_begin).
    void cumulative(std::size_t m, std::int64_t j_local, cplx w[2]) const;

    /// Materializes increments (used by the checkpoint writer and tests).
    void materialize();
    bool materialized() const { return static_cast<bool>(data_); }

    friend WienerPath load_path(std::istream& is);
    friend void save_path(std::ostream& os, const WienerPath& p);
    friend WienerPath shift_path(const WienerPath& p, double t);

  private:
    void project(cplx w[2], std::size_t m) const;
    void raw_gaussians(std::uint64_t stream_tag, std::size_t m, std::int64_t j_abs, double s,
                       cplx w[2]) const;

    NoiseSpec spec_;
    GridSpec grid_;
    double nu_ = 1.0;
    double dtb_ = 1e-3;
    std::int64_t jb_ = 0, je_ = 0, shift_ = 0;
    std::vector<DrivenMode> modes_;
    std::optional<std::vector<double>> data_;  // materialized increments
};

/// Path on the window [-T, 0] with step dt.
WienerPath sample_wiener_path(const NoiseSpec& spec, const GridSpec& grid, double nu, double T,
                              double dt);

/// theta_t: re-anchors the path; t must be a grid multiple of dt_base.
WienerPath shift_path(const WienerPath& p, double t);

// ---- Ornstein-Uhlenbeck driver ----------------------------------------------

/// State of the stationary OU process dq + (nu A + I) q dt = dW.
struct OUState {
    SpectralField q;
    double nu = 1.0;
};

/// Stationary draw at the path's local start (variance sigma_k^2 / (2 mu_k)).
OUState ou_stationary_init(const WienerPath& path);
OUState ou_zero_init(const WienerPath& path);

/// Conditionally-exact update over agg base steps: the OU convolution
/// increment is drawn jointly with the Brownian increment that also drives
/// the Euler-Maruyama cross-check.
void ou_step(OUState& st, const WienerPath& path, std::int64_t j_local, int agg = 1);

/// Per-sample driven-mode values of the OU process along a path, computed
/// once and shared by every integration on that path.
struct QTrajectory {
    std::int64_t n_samples = 0;  // = n_steps/agg + 1
    int agg = 1;
    std::vector<cplx> vals;      // [sample][mode][comp]
    int n_modes = 0;

    const cplx* at(std::int64_t sample) const { return &vals[sample * 2 * n_modes]; }
};

QTrajectory ou_trajectory(const WienerPath& path, int agg, bool stationary_init = true);

/// Writes the driven-mode values for one sample into a spectral field
/// (overwrites only the driven modes and their mirrors; field must otherwise
/// stay zero).
void q_to_field(const WienerPath& path, const cplx* mode_vals, SpectralField& out);

struct TemperedCheck {
    double sup_ratio = 0.0;  // max over t <= -T/2 of ||q||_2^2 e^{c t}
    double integral = 0.0;   // quadrature of {1 + ||q||_2^2 + ||q||_W14^4} e^{c t} over [-T, 0]
};

TemperedCheck ou_tempered_check(const NoiseSpec& spec, const GridSpec& grid, double nu, double c,
                                double T, double dt);

// ---- checkpoint ("TGFW") ------------------------------------------------------

void save_path(std::ostream& os, const WienerPath& p);
WienerPath load_path(std::istream& is);

}  // namespace tgf
