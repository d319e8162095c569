#include "tgf/noise.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "tgf/rng.hpp"

namespace tgf {

void validate(const NoiseSpec& s) {
    if (s.sigma0 < 0.0) throw std::invalid_argument("noise: sigma0 must be nonnegative");
    if (s.decay_s < 3.0)
        throw std::invalid_argument("noise: decay_s must be >= 3 for grid-stable path norms");
    if (s.k_cut < 1) throw std::invalid_argument("noise: k_cut must be >= 1");
    if (!(s.varsigma > 0.0 && s.varsigma <= 1.0))
        throw std::invalid_argument("noise: varsigma must lie in (0, 1]");
}

WienerPath::WienerPath(const NoiseSpec& spec, const GridSpec& grid, double nu, double dt_base,
                       std::int64_t j_begin_abs, std::int64_t j_end_abs, std::int64_t shift_steps)
    : spec_(spec), grid_(grid), nu_(nu), dtb_(dt_base), jb_(j_begin_abs), je_(j_end_abs),
      shift_(shift_steps) {
    if (!(dt_base > 0.0)) throw std::invalid_argument("path: dt must be positive");
    if (je_ < jb_) throw std::invalid_argument("path: empty window");
    const int km = grid.kmax();
    if (spec.k_cut > km)
        throw std::invalid_argument("noise: k_cut exceeds the grid's retained band");
    const double k0 = grid.kappa0();
    for (int kx = -spec.k_cut; kx <= spec.k_cut; ++kx)
        for (int ky = 0; ky <= spec.k_cut; ++ky) {
            if (ky == 0 && kx <= 0) continue;  // half-space; mirrors via conjugation
            const int kk = kx * kx + ky * ky;
            if (kk == 0 || kk > spec.k_cut * spec.k_cut) continue;
            DrivenMode m;
            m.kx = kx;
            m.ky = ky;
            m.sigma = spec.sigma0 * std::pow(std::sqrt(double(kk)), -spec.decay_s);
            m.mu = nu * k0 * k0 * kk + 1.0;
            modes_.push_back(m);
        }
}

void WienerPath::project(cplx w[2], std::size_t m) const {
    const DrivenMode& dm = modes_[m];
    const double kx = dm.kx, ky = dm.ky;
    const double kk = kx * kx + ky * ky;
    const cplx d = (kx * w[0] + ky * w[1]) / kk;
    w[0] -= kx * d;
    w[1] -= ky * d;
}

void WienerPath::raw_gaussians(std::uint64_t stream_tag, std::size_t m, std::int64_t j_abs,
                               double s, cplx w[2]) const {
    const DrivenMode& dm = modes_[m];
    const std::uint64_t key = rng::hash5(
        spec_.master_seed, stream_tag, static_cast<std::uint64_t>(std::int64_t(dm.kx)),
        static_cast<std::uint64_t>(std::int64_t(dm.ky)), static_cast<std::uint64_t>(j_abs));
    double z0, z1, z2, z3;
    rng::gaussian_pair(key, 0, z0, z1);
    rng::gaussian_pair(key, 1, z2, z3);
    w[0] = cplx(s * z0, s * z1);
    w[1] = cplx(s * z2, s * z3);
    project(w, m);
}

void WienerPath::increment(std::size_t m, std::int64_t j_local, cplx w[2]) const {
    if (j_local < 0 || j_local >= n_steps()) throw std::out_of_range("path increment outside window");
    if (data_) {
        const std::size_t base = (static_cast<std::size_t>(j_local) * modes_.size() + m) * 4;
        w[0] = cplx((*data_)[base], (*data_)[base + 1]);
        w[1] = cplx((*data_)[base + 2], (*data_)[base + 3]);
        return;
    }
    // real/imag each N(0, sigma^2 dt / 2): the projected amplitude is a complex
    // Brownian increment with E|dw|^2 = sigma^2 dt
    const double s = modes_[m].sigma * std::sqrt(0.5 * dtb_);
    raw_gaussians(static_cast<std::uint64_t>(rng::Stream::WienerIncrement), m, jb_ + j_local, s, w);
}

void WienerPath::aux_gaussian(std::size_t m, std::int64_t j_local, cplx w[2]) const {
    const double s = std::sqrt(0.5);  // projected total variance 1
    raw_gaussians(static_cast<std::uint64_t>(rng::Stream::OuAux), m, jb_ + j_local, s, w);
}

void WienerPath::stationary_draw(std::size_t m, std::int64_t j_abs, cplx w[2]) const {
    const DrivenMode& dm = modes_[m];
    const double sd = dm.sigma / std::sqrt(2.0 * dm.mu);  // rms of the stationary amplitude
    raw_gaussians(static_cast<std::uint64_t>(rng::Stream::OuInit), m, j_abs, sd * std::sqrt(0.5), w);
}

void WienerPath::cumulative(std::size_t m, std::int64_t j_local, cplx w[2]) const {
    // anchor omega = 0 at the local time origin when inside the window
    std::int64_t j_anchor = shift_ - jb_;  // local index of local time 0
    if (j_anchor < 0 || j_anchor > n_steps()) j_anchor = 0;
    w[0] = w[1] = cplx{};
    cplx d[2];
    const std::int64_t lo = std::min(j_anchor, j_local), hi = std::max(j_anchor, j_local);
    for (std::int64_t j = lo; j < hi; ++j) {
        increment(m, j, d);
        w[0] += d[0];
        w[1] += d[1];
    }
    if (j_local < j_anchor) {
        w[0] = -w[0];
        w[1] = -w[1];
    }
}

void WienerPath::materialize() {
    if (data_) return;
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n_steps()) * modes_.size() * 4);
    cplx w[2];
    for (std::int64_t j = 0; j < n_steps(); ++j)
        for (std::size_t m = 0; m < modes_.size(); ++m) {
            increment(m, j, w);
            d.push_back(w[0].real());
            d.push_back(w[0].imag());
            d.push_back(w[1].real());
            d.push_back(w[1].imag());
        }
    data_ = std::move(d);
}

WienerPath sample_wiener_path(const NoiseSpec& spec, const GridSpec& grid, double nu, double T,
                              double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("path: T and dt must be positive");
    const std::int64_t steps = std::llround(T / dt);
    return WienerPath(spec, grid, nu, dt, -steps, 0, 0);
}

WienerPath shift_path(const WienerPath& p, double t) {
    const double steps_f = t / p.dt_base();
    const std::int64_t steps = std::llround(steps_f);
    if (std::abs(steps_f - double(steps)) > 1e-9)
        throw std::invalid_argument("shift_path: t is not on the path's grid");
    WienerPath q = p;
    q.shift_ += steps;
    return q;
}

OUState ou_stationary_init(const WienerPath& path) {
    OUState st;
    st.nu = path.nu();
    st.q = SpectralField(path.grid());
    cplx w[2];
    SpectralField& f = st.q;
    const GridSpec& g = path.grid();
    for (std::size_t m = 0; m < path.modes().size(); ++m) {
        path.stationary_draw(m, path.abs_begin(), w);
        const DrivenMode& dm = path.modes()[m];
        f.at(0, g.index_of(dm.kx), g.index_of(dm.ky)) = w[0];
        f.at(1, g.index_of(dm.kx), g.index_of(dm.ky)) = w[1];
        f.at(0, g.index_of(-dm.kx), g.index_of(-dm.ky)) = std::conj(w[0]);
        f.at(1, g.index_of(-dm.kx), g.index_of(-dm.ky)) = std::conj(w[1]);
    }
    return st;
}

OUState ou_zero_init(const WienerPath& path) {
    OUState st;
    st.nu = path.nu();
    st.q = SpectralField(path.grid());
    return st;
}

void ou_step(OUState& st, const WienerPath& path, std::int64_t j_local, int agg) {
    const GridSpec& g = path.grid();
    const double h = agg * path.dt_base();
    cplx dw[2], one[2], aux[2];
    for (std::size_t m = 0; m < path.modes().size(); ++m) {
        const DrivenMode& dm = path.modes()[m];
        dw[0] = dw[1] = cplx{};
        for (int i = 0; i < agg; ++i) {
            path.increment(m, j_local + i, one);
            dw[0] += one[0];
            dw[1] += one[1];
        }
        path.aux_gaussian(m, j_local, aux);
        const double mu = dm.mu, sig = dm.sigma;
        const double emh = std::exp(-mu * h);
        const double a = (1.0 - emh) / (mu * h);
        const double var_conv = sig * sig * (1.0 - emh * emh) / (2.0 * mu);
        const double cov = sig * sig * (1.0 - emh) / mu;
        double v = var_conv - cov * cov / (sig * sig * h);
        if (!(v > 0.0)) v = 0.0;  // roundoff guard for mu h << 1
        const double sv = std::sqrt(v);
        const int i0 = g.index_of(dm.kx), j0 = g.index_of(dm.ky);
        const int i1 = g.index_of(-dm.kx), j1 = g.index_of(-dm.ky);
        for (int comp = 0; comp < 2; ++comp) {
            const cplx qn = st.q.at(comp, i0, j0);
            const cplx qe = emh * qn + a * dw[comp] + sv * aux[comp];
            st.q.at(comp, i0, j0) = qe;
            st.q.at(comp, i1, j1) = std::conj(qe);
        }
    }
}

QTrajectory ou_trajectory(const WienerPath& path, int agg, bool stationary_init) {
    if (agg < 1 || path.n_steps() % agg != 0)
        throw std::invalid_argument("ou_trajectory: aggregation must divide the step count");
    QTrajectory tr;
    tr.agg = agg;
    tr.n_modes = static_cast<int>(path.modes().size());
    tr.n_samples = path.n_steps() / agg + 1;
    tr.vals.resize(static_cast<std::size_t>(tr.n_samples) * 2 * tr.n_modes);
    OUState st = stationary_init ? ou_stationary_init(path) : ou_zero_init(path);
    const GridSpec& g = path.grid();
    auto store = [&](std::int64_t sample) {
        cplx* out = &tr.vals[static_cast<std::size_t>(sample) * 2 * tr.n_modes];
        for (int m = 0; m < tr.n_modes; ++m) {
            const DrivenMode& dm = path.modes()[m];
            out[2 * m] = st.q.at(0, g.index_of(dm.kx), g.index_of(dm.ky));
            out[2 * m + 1] = st.q.at(1, g.index_of(dm.kx), g.index_of(dm.ky));
        }
    };
    store(0);
    for (std::int64_t s = 1; s < tr.n_samples; ++s) {
        ou_step(st, path, (s - 1) * agg, agg);
        store(s);
    }
    return tr;
}

void q_to_field(const WienerPath& path, const cplx* mode_vals, SpectralField& out) {
    const GridSpec& g = path.grid();
    for (std::size_t m = 0; m < path.modes().size(); ++m) {
        const DrivenMode& dm = path.modes()[m];
        const cplx a = mode_vals[2 * m], b = mode_vals[2 * m + 1];
        out.at(0, g.index_of(dm.kx), g.index_of(dm.ky)) = a;
        out.at(1, g.index_of(dm.kx), g.index_of(dm.ky)) = b;
        out.at(0, g.index_of(-dm.kx), g.index_of(-dm.ky)) = std::conj(a);
        out.at(1, g.index_of(-dm.kx), g.index_of(-dm.ky)) = std::conj(b);
    }
}

TemperedCheck ou_tempered_check(const NoiseSpec& spec, const GridSpec& grid, double nu, double c,
                                double T, double dt) {
    if (!(c > 0.0)) throw std::invalid_argument("tempered check: c must be positive");
    WienerPath path = sample_wiener_path(spec, grid, nu, T, dt);
    OUState st = ou_stationary_init(path);
    TemperedCheck out;
    const std::int64_t n = path.n_steps();
    for (std::int64_t j = 0; j <= n; ++j) {
        const double t = (j - n) * dt;  // in [-T, 0]
        const double l2 = norm(st.q, NormKind::L2);
        const double w14 = norm(st.q, NormKind::W14);
        const double w = std::exp(c * t);
        if (t <= -0.5 * T) out.sup_ratio = std::max(out.sup_ratio, l2 * l2 * w);
        out.integral += dt * (1.0 + l2 * l2 + w14 * w14 * w14 * w14) * w;
        if (j < n) ou_step(st, path, j, 1);
    }
    return out;
}

// ---- checkpoint ---------------------------------------------------------------

namespace {
template <typename T>
void wr(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void rd(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_path(std::ostream& os, const WienerPath& p) {
    WienerPath copy = p;
    copy.materialize();
    os.write("TGFW", 4);
    wr(os, copy.spec_.sigma0);
    wr(os, copy.spec_.decay_s);
    wr(os, static_cast<std::uint32_t>(copy.spec_.k_cut));
    wr(os, copy.spec_.varsigma);
    wr(os, copy.spec_.master_seed);
    wr(os, copy.nu_);
    wr(os, copy.dtb_);
    wr(os, copy.jb_);
    wr(os, copy.je_);
    wr(os, copy.shift_);
    wr(os, static_cast<std::uint32_t>(copy.grid_.n));
    wr(os, copy.grid_.L);
    wr(os, static_cast<std::uint32_t>(copy.grid_.dealias));
    for (double v : *copy.data_) wr(os, v);
}

WienerPath load_path(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "TGFW")
        throw std::runtime_error("path checkpoint: bad magic, expected TGFW");
    NoiseSpec spec;
    std::uint32_t kcut = 0, n = 0, dealias = 0;
    double nu = 0, dtb = 0, L = 0;
    std::int64_t jb = 0, je = 0, shift = 0;
    rd(is, spec.sigma0);
    rd(is, spec.decay_s);
    rd(is, kcut);
    rd(is, spec.varsigma);
    rd(is, spec.master_seed);
    rd(is, nu);
    rd(is, dtb);
    rd(is, jb);
    rd(is, je);
    rd(is, shift);
    rd(is, n);
    rd(is, L);
    rd(is, dealias);
    spec.k_cut = static_cast<int>(kcut);
    GridSpec g{static_cast<int>(n), L, static_cast<int>(dealias)};
    WienerPath p(spec, g, nu, dtb, jb, je, shift);
    std::vector<double> data(static_cast<std::size_t>(p.n_steps()) * p.modes().size() * 4);
    for (double& v : data) rd(is, v);
    if (!is) throw std::runtime_error("path checkpoint: truncated file");
    p.data_ = std::move(data);
    return p;
}

}  // namespace tgf
