#include "tgf/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tgf/artifacts.hpp"
#include "tgf/operators.hpp"

namespace tgf {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: bad numeric value for key '" + key + "': " + v);
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: bad integer value for key '" + key + "': " + v);
    }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list for key '" + key + "'");
    return out;
}

// "kx ky c re im ; ..." entries for forcing.preset = modes
std::vector<ModeEntry> to_modes(const std::string& key, const std::string& v) {
    std::vector<ModeEntry> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::stringstream es(item);
        ModeEntry e;
        double re = 0, im = 0;
        if (!(es >> e.kx >> e.ky >> e.comp >> re >> im))
            throw ConfigError("config: bad mode entry for key '" + key + "': " + item);
        e.value = cplx(re, im);
        out.push_back(e);
    }
    if (out.empty()) throw ConfigError("config: no mode entries for key '" + key + "'");
    return out;
}

void apply(RunConfig& c, const std::string& key, const std::string& v) {
    if (key == "grid.n") c.grid.n = int(to_int(key, v));
    else if (key == "grid.length") c.grid.L = to_double(key, v);
    else if (key == "grid.dealias") c.grid.dealias = int(to_int(key, v));
    else if (key == "params.nu") c.nu = to_double(key, v);
    else if (key == "params.alpha") c.alpha = to_double(key, v);
    else if (key == "params.beta") c.beta = to_double(key, v);
    else if (key == "forcing.preset") c.forcing_preset = v;
    else if (key == "forcing.amplitude") c.forcing_amplitude = to_double(key, v);
    else if (key == "forcing.modes") c.forcing_modes = to_modes(key, v);
    else if (key == "noise.sigma0") c.noise.sigma0 = to_double(key, v);
    else if (key == "noise.decay_s") c.noise.decay_s = to_double(key, v);
    else if (key == "noise.k_cut") c.noise.k_cut = int(to_int(key, v));
    else if (key == "noise.varsigma") c.noise.varsigma = to_double(key, v);
    else if (key == "solver.dt") c.dt = to_double(key, v);
    else if (key == "solver.t_end") c.t_end = to_double(key, v);
    else if (key == "solver.monitor_stride") c.monitor_stride = int(to_int(key, v));
    else if (key == "solver.steady_tol") c.steady_tol = to_double(key, v);
    else if (key == "pullback.horizon") c.pullback_horizon = to_double(key, v);
    else if (key == "pullback.n_ics") c.pullback_n_ics = int(to_int(key, v));
    else if (key == "pullback.ic_amplitude") c.ic_amplitude = to_double(key, v);
    else if (key == "attractor.n_ics") c.attractor_n_ics = int(to_int(key, v));
    else if (key == "rate.varsigmas") c.rate_varsigmas = to_list(key, v);
    else if (key == "rate.seeds") c.rate_seeds = int(to_int(key, v));
    else if (key == "study.md_trials") c.md_trials = int(to_int(key, v));
    else if (key == "run.master_seed") c.master_seed = std::uint64_t(to_int(key, v));
    else if (key == "run.output_dir") c.output_dir = v;
    else if (key == "run.threads") c.threads = int(to_int(key, v));
    else throw ConfigError("config: unknown key '" + key + "'");
}

void flatten_json(RunConfig& c, const nlohmann::json& j, const std::string& prefix) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            flatten_json(c, *it, key);
        } else if (it->is_string()) {
            apply(c, key, it->get<std::string>());
        } else if (it->is_array()) {
            std::string list;
            for (const auto& x : *it) {
                if (!list.empty()) list += ",";
                list += fmt_double(x.get<double>());
            }
            apply(c, key, list);
        } else {
            apply(c, key, it->dump());
        }
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: JSON parse error: ") + e.what());
        }
        flatten_json(c, j, "");
    } else {
        std::stringstream ss(text);
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config: line " + std::to_string(lineno) +
                                  " is not 'key = value': " + line);
            apply(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

void validate(const RunConfig& cfg) {
    try {
        validate(cfg.grid);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    // admissibility gate |alpha| < sqrt(2 nu beta) is enforced at load
    try {
        (void)make_params(cfg.nu, cfg.alpha, cfg.beta, cfg.grid.lambda_poincare(), 1.0);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        validate(cfg.noise);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.noise.k_cut > cfg.grid.kmax())
        throw ConfigError("config: noise.k_cut exceeds the grid's retained band");
    if (!(cfg.dt > 0.0)) throw ConfigError("config: solver.dt must be positive");
    if (!(cfg.t_end > 0.0)) throw ConfigError("config: solver.t_end must be positive");
    if (cfg.monitor_stride < 1) throw ConfigError("config: solver.monitor_stride must be >= 1");
    if (!(cfg.steady_tol > 0.0)) throw ConfigError("config: solver.steady_tol must be positive");
    if (cfg.pullback_n_ics < 1) throw ConfigError("config: pullback.n_ics must be >= 1");
    if (cfg.attractor_n_ics < 2) throw ConfigError("config: attractor.n_ics must be >= 2");
    if (cfg.rate_seeds < 1) throw ConfigError("config: rate.seeds must be >= 1");
    if (cfg.md_trials < 100) throw ConfigError("config: study.md_trials must be >= 100");
    if (cfg.forcing_preset != "taylor-green" && cfg.forcing_preset != "modes" &&
        cfg.forcing_preset != "zero")
        throw ConfigError("config: forcing.preset must be taylor-green, modes or zero");
    for (double v : cfg.rate_varsigmas)
        if (!(v > 0.0 && v <= 1.0))
            throw ConfigError("config: rate.varsigmas entries must lie in (0, 1]");
}

SpectralField build_forcing(const RunConfig& cfg) {
    if (cfg.forcing_preset == "zero") return SpectralField(cfg.grid);
    if (cfg.forcing_preset == "taylor-green") return taylor_green(cfg.grid, cfg.forcing_amplitude);
    return leray_project(field_from_modes(cfg.grid, cfg.forcing_modes));
}

std::string config_to_text(const RunConfig& c) {
    std::ostringstream os;
    os << "grid.n = " << c.grid.n << "\n";
    os << "grid.length = " << fmt_double(c.grid.L) << "\n";
    os << "grid.dealias = " << c.grid.dealias << "\n";
    os << "params.nu = " << fmt_double(c.nu) << "\n";
    os << "params.alpha = " << fmt_double(c.alpha) << "\n";
    os << "params.beta = " << fmt_double(c.beta) << "\n";
    os << "forcing.preset = " << c.forcing_preset << "\n";
    os << "forcing.amplitude = " << fmt_double(c.forcing_amplitude) << "\n";
    os << "noise.sigma0 = " << fmt_double(c.noise.sigma0) << "\n";
    os << "noise.decay_s = " << fmt_double(c.noise.decay_s) << "\n";
    os << "noise.k_cut = " << c.noise.k_cut << "\n";
    os << "noise.varsigma = " << fmt_double(c.noise.varsigma) << "\n";
    os << "solver.dt = " << fmt_double(c.dt) << "\n";
    os << "solver.t_end = " << fmt_double(c.t_end) << "\n";
    os << "solver.monitor_stride = " << c.monitor_stride << "\n";
    os << "solver.steady_tol = " << fmt_double(c.steady_tol) << "\n";
    os << "pullback.horizon = " << fmt_double(c.pullback_horizon) << "\n";
    os << "pullback.n_ics = " << c.pullback_n_ics << "\n";
    os << "pullback.ic_amplitude = " << fmt_double(c.ic_amplitude) << "\n";
    os << "attractor.n_ics = " << c.attractor_n_ics << "\n";
    os << "rate.varsigmas = ";
    for (std::size_t i = 0; i < c.rate_varsigmas.size(); ++i)
        os << (i ? "," : "") << fmt_double(c.rate_varsigmas[i]);
    os << "\n";
    os << "rate.seeds = " << c.rate_seeds << "\n";
    os << "study.md_trials = " << c.md_trials << "\n";
    os << "run.master_seed = " << c.master_seed << "\n";
    os << "run.output_dir = " << c.output_dir << "\n";
    os << "run.threads = " << c.threads << "\n";
    return os.str();
}

}  // namespace tgf
