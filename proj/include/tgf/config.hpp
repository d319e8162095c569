#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tgf/field.hpp"
#include "tgf/noise.hpp"

namespace tgf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full run configuration.  Text format is flat `section.key = value` lines
/// (# comments); a JSON object with the same dotted keys (flat or nested) is
/// accepted as an alternative.
struct RunConfig {
    GridSpec grid{32, kTwoPi, 2};
    double nu = 1.0;
    double alpha = 0.0;
    double beta = 1.0;

    std::string forcing_preset = "taylor-green";  // taylor-green | modes | zero
    double forcing_amplitude = 0.2;
    std::vector<ModeEntry> forcing_modes;

    NoiseSpec noise;

    double dt = 1e-3;
    double t_end = 10.0;
    int monitor_stride = 100;
    double steady_tol = 1e-8;

    double pullback_horizon = 0.0;  // 0 = 4/rho ln(1/steady_tol) heuristic
    int pullback_n_ics = 4;
    double ic_amplitude = 0.5;
    int attractor_n_ics = 8;

    std::vector<double> rate_varsigmas{0.4, 0.2, 0.1, 0.05};
    int rate_seeds = 20;
    int md_trials = 200;

    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    int threads = 0;  // 0: TGF_THREADS or hardware
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Validates cross-field constraints (parameter admissibility, noise band
/// inside the grid, ...); throws ConfigError naming the offending key.
void validate(const RunConfig& cfg);

/// The forcing field described by the config.
SpectralField build_forcing(const RunConfig& cfg);

std::string config_to_text(const RunConfig& cfg);  // canonical key=value dump

}  // namespace tgf
