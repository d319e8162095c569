#include "tgf/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tgf/rng.hpp"

namespace tgf {

namespace {

double quad_weight(const GridSpec& g) {
    const double h = g.L / g.pad();
    return h * h;
}

void check_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field grid mismatch");
}

}  // namespace

void set_zero(SpectralField& f) {
    std::fill(f.c[0].begin(), f.c[0].end(), cplx{});
    std::fill(f.c[1].begin(), f.c[1].end(), cplx{});
}

void axpy(SpectralField& y, double a, const SpectralField& x) {
    check_same_grid(y, x);
    for (int comp = 0; comp < 2; ++comp)
        for (std::size_t s = 0; s < y.c[comp].size(); ++s) y.c[comp][s] += a * x.c[comp][s];
}

void scale(SpectralField& f, double a) {
    for (int comp = 0; comp < 2; ++comp)
        for (auto& v : f.c[comp]) v *= a;
}

SpectralField added(const SpectralField& a, const SpectralField& b) {
    SpectralField r = a;
    axpy(r, 1.0, b);
    return r;
}

SpectralField subbed(const SpectralField& a, const SpectralField& b) {
    SpectralField r = a;
    axpy(r, -1.0, b);
    return r;
}

double l2_inner(const SpectralField& f, const SpectralField& g) {
    check_same_grid(f, g);
    double s = 0.0;
    for (int comp = 0; comp < 2; ++comp)
        for (std::size_t i = 0; i < f.c[comp].size(); ++i) {
            const cplx& a = f.c[comp][i];
            const cplx& b = g.c[comp][i];
            s += a.real() * b.real() + a.imag() * b.imag();
        }
    return s * f.grid.L * f.grid.L;
}

void leray_project_inplace(SpectralField& f) {
    const GridSpec& g = f.grid;
    const int n = g.n;
    const int half = n / 2;
    const double k0 = g.kappa0();
    for (int i = 0; i < n; ++i) {
        const double kx = k0 * g.wavenumber(i);
        for (int j = 0; j < n; ++j) {
            const std::size_t s = static_cast<std::size_t>(i) * n + j;
            if ((i == 0 && j == 0) || i == half || j == half) {
                f.c[0][s] = cplx{};
                f.c[1][s] = cplx{};
                continue;
            }
            const double ky = k0 * g.wavenumber(j);
            const double kk = kx * kx + ky * ky;
            const cplx d = (kx * f.c[0][s] + ky * f.c[1][s]) / kk;
            f.c[0][s] -= kx * d;
            f.c[1][s] -= ky * d;
        }
    }
}

SpectralField leray_project(const SpectralField& raw) {
    SpectralField f = raw;
    leray_project_inplace(f);
    return f;
}

TensorField sym_grad(const SpectralField& m) {
    const GridSpec& g = m.grid;
    const SpectralTables& t = tables(g);
    PaddedTransform tr(g);
    const std::size_t np = static_cast<std::size_t>(g.pad()) * g.pad();
    std::vector<double> dx1(np), dy1(np), dx2(np), dy2(np);
    tr.to_physical(m.c[0].data(), t.ikx.data(), dx1.data(), m.c[0].data(), t.iky.data(), dy1.data());
    tr.to_physical(m.c[1].data(), t.ikx.data(), dx2.data(), m.c[1].data(), t.iky.data(), dy2.data());
    TensorField a(g);
    for (std::size_t s = 0; s < np; ++s) {
        a.e[0][s] = 2.0 * dx1[s];
        const double off = dy1[s] + dx2[s];
        a.e[1][s] = off;
        a.e[2][s] = off;
        a.e[3][s] = 2.0 * dy2[s];
    }
    return a;
}

double norm(const SpectralField& f, NormKind kind) {
    const GridSpec& g = f.grid;
    const SpectralTables& t = tables(g);
    switch (kind) {
        case NormKind::L2: {
            double s = 0.0;
            for (int comp = 0; comp < 2; ++comp)
                for (const auto& v : f.c[comp]) s += std::norm(v);
            return g.L * std::sqrt(s);
        }
        case NormKind::V: {
            double s = 0.0;
            for (int comp = 0; comp < 2; ++comp)
                for (std::size_t i = 0; i < f.c[comp].size(); ++i)
                    s += t.k2[i] * std::norm(f.c[comp][i]);
            return g.L * std::sqrt(s);
        }
        case NormKind::Hminus1: {
            double s = 0.0;
            for (int comp = 0; comp < 2; ++comp)
                for (std::size_t i = 0; i < f.c[comp].size(); ++i)
                    if (t.k2[i] > 0.0) s += std::norm(f.c[comp][i]) / t.k2[i];
            return g.L * std::sqrt(s);
        }
        case NormKind::L4: {
            PaddedTransform tr(g);
            const std::size_t np = static_cast<std::size_t>(g.pad()) * g.pad();
            std::vector<double> p1(np), p2(np);
            tr.to_physical(f.c[0].data(), nullptr, p1.data(), f.c[1].data(), nullptr, p2.data());
            double s = 0.0;
            for (std::size_t i = 0; i < np; ++i) {
                const double q = p1[i] * p1[i] + p2[i] * p2[i];
                s += q * q;
            }
            return std::pow(quad_weight(g) * s, 0.25);
        }
        case NormKind::Linf: {
            // max over the padded grid; a lower bound of the true sup
            PaddedTransform tr(g);
            const std::size_t np = static_cast<std::size_t>(g.pad()) * g.pad();
            std::vector<double> p1(np), p2(np);
            tr.to_physical(f.c[0].data(), nullptr, p1.data(), f.c[1].data(), nullptr, p2.data());
            double s = 0.0;
            for (std::size_t i = 0; i < np; ++i)
                s = std::max(s, p1[i] * p1[i] + p2[i] * p2[i]);
            return std::sqrt(s);
        }
        case NormKind::W14: {
            PaddedTransform tr(g);
            const std::size_t np = static_cast<std::size_t>(g.pad()) * g.pad();
            std::vector<double> p1(np), p2(np), dx1(np), dy1(np), dx2(np), dy2(np);
            tr.to_physical(f.c[0].data(), nullptr, p1.data(), f.c[1].data(), nullptr, p2.data());
            tr.to_physical(f.c[0].data(), t.ikx.data(), dx1.data(), f.c[0].data(), t.iky.data(),
                           dy1.data());
            tr.to_physical(f.c[1].data(), t.ikx.data(), dx2.data(), f.c[1].data(), t.iky.data(),
                           dy2.data());
            double s = 0.0;
            for (std::size_t i = 0; i < np; ++i) {
                const double q = p1[i] * p1[i] + p2[i] * p2[i];
                const double dq = dx1[i] * dx1[i] + dy1[i] * dy1[i] + dx2[i] * dx2[i] + dy2[i] * dy2[i];
                s += q * q + dq * dq;
            }
            return std::pow(quad_weight(g) * s, 0.25);
        }
    }
    throw std::logic_error("unreachable norm kind");
}

double norm(const TensorField& a, NormKind kind) {
    const std::size_t np = a.e[0].size();
    switch (kind) {
        case NormKind::L2: {
            double s = 0.0;
            for (const auto& comp : a.e)
                for (double v : comp) s += v * v;
            return std::sqrt(quad_weight(a.grid) * s);
        }
        case NormKind::L4: {
            double s = 0.0;
            for (std::size_t i = 0; i < np; ++i) {
                const double q = a.e[0][i] * a.e[0][i] + a.e[1][i] * a.e[1][i] +
                                 a.e[2][i] * a.e[2][i] + a.e[3][i] * a.e[3][i];
                s += q * q;
            }
            return std::pow(quad_weight(a.grid) * s, 0.25);
        }
        case NormKind::Linf: {
            double s = 0.0;
            for (std::size_t i = 0; i < np; ++i) {
                const double q = a.e[0][i] * a.e[0][i] + a.e[1][i] * a.e[1][i] +
                                 a.e[2][i] * a.e[2][i] + a.e[3][i] * a.e[3][i];
                s = std::max(s, q);
            }
            return std::sqrt(s);
        }
        default:
            throw std::invalid_argument("norm kind not defined for tensor fields");
    }
}

SpectralField random_divfree_field(const GridSpec& grid, double exponent, std::uint64_t seed) {
    if (!(exponent > 1.0))
        throw std::invalid_argument("spectrum exponent must exceed 1 for grid-stable norms");
    SpectralField f(grid);
    const int km = grid.kmax();
    for (int kx = -km; kx <= km; ++kx) {
        for (int ky = 0; ky <= km; ++ky) {
            if (ky == 0 && kx <= 0) continue;  // half-space; mirror fixed by symmetry
            if (kx * kx + ky * ky > km * km) continue;
            const double amp = std::pow(std::sqrt(double(kx * kx + ky * ky)), -exponent);
            const std::uint64_t key = rng::stream_key(seed, rng::Stream::FieldGen,
                                                      static_cast<std::uint64_t>(std::int64_t(kx)),
                                                      static_cast<std::uint64_t>(std::int64_t(ky)));
            double z0, z1, z2, z3;
            rng::gaussian_pair(key, 0, z0, z1);
            rng::gaussian_pair(key, 1, z2, z3);
            const int i = grid.index_of(kx), j = grid.index_of(ky);
            const int im = grid.index_of(-kx), jm = grid.index_of(-ky);
            f.at(0, i, j) = amp * cplx(z0, z1);
            f.at(1, i, j) = amp * cplx(z2, z3);
            f.at(0, im, jm) = std::conj(f.at(0, i, j));
            f.at(1, im, jm) = std::conj(f.at(1, i, j));
        }
    }
    leray_project_inplace(f);
    const double l2 = norm(f, NormKind::L2);
    if (l2 > 0.0) scale(f, 1.0 / l2);
    return f;
}

double relative_divergence(const SpectralField& f) {
    const GridSpec& g = f.grid;
    const double k0 = g.kappa0();
    double num = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double kx = k0 * g.wavenumber(i);
        for (int j = 0; j < g.n; ++j) {
            const double ky = k0 * g.wavenumber(j);
            const std::size_t s = static_cast<std::size_t>(i) * g.n + j;
            num += std::norm(kx * f.c[0][s] + ky * f.c[1][s]);
        }
    }
    const double den = norm(f, NormKind::V);
    return den > 0.0 ? g.L * std::sqrt(num) / den : 0.0;
}

double conjugate_symmetry_error(const SpectralField& f) {
    const GridSpec& g = f.grid;
    double err = 0.0;
    for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < g.n; ++i) {
            const int im = (g.n - i) % g.n;
            for (int j = 0; j < g.n; ++j) {
                const int jm = (g.n - j) % g.n;
                err = std::max(err, std::abs(f.at(comp, i, j) - std::conj(f.at(comp, im, jm))));
            }
        }
    return err;
}

bool all_finite(const SpectralField& f) {
    for (int comp = 0; comp < 2; ++comp)
        for (const auto& v : f.c[comp])
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

SpectralField field_from_modes(const GridSpec& grid, const std::vector<ModeEntry>& entries) {
    SpectralField f(grid);
    const int km = grid.kmax();
    for (const ModeEntry& e : entries) {
        if (e.comp < 0 || e.comp > 1) throw std::invalid_argument("mode entry: bad component");
        if (e.kx == 0 && e.ky == 0) throw std::invalid_argument("mode entry: k=0 violates zero mean");
        if (std::abs(e.kx) > km || std::abs(e.ky) > km)
            throw std::invalid_argument("mode entry: wavenumber outside retained band");
        f.at(e.comp, grid.index_of(e.kx), grid.index_of(e.ky)) += e.value;
        f.at(e.comp, grid.index_of(-e.kx), grid.index_of(-e.ky)) += std::conj(e.value);
    }
    return f;
}

SpectralField taylor_green(const GridSpec& grid, double gamma) {
    PaddedTransform tr(grid);
    const int mp = grid.pad();
    const std::size_t np = static_cast<std::size_t>(mp) * mp;
    std::vector<double> p1(np), p2(np);
    const double k0 = grid.kappa0();
    const double h = grid.L / mp;
    for (int ix = 0; ix < mp; ++ix) {
        const double x = h * ix;
        for (int iy = 0; iy < mp; ++iy) {
            const double y = h * iy;
            p1[static_cast<std::size_t>(ix) * mp + iy] = gamma * std::sin(k0 * x) * std::cos(k0 * y);
            p2[static_cast<std::size_t>(ix) * mp + iy] = -gamma * std::cos(k0 * x) * std::sin(k0 * y);
        }
    }
    SpectralField f(grid);
    tr.to_spectral(p1.data(), nullptr, p2.data(), f.c[0].data(), f.c[1].data());
    leray_project_inplace(f);
    return f;
}

// ---- checkpoint -------------------------------------------------------------

namespace {
template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_raw(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_field(std::ostream& os, const SpectralField& f) {
    const GridSpec& g = f.grid;
    os.write("TGF1", 4);
    write_raw(os, static_cast<std::uint32_t>(g.n));
    write_raw(os, g.L);
    const int half = g.n / 2;
    for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j <= half; ++j) {
                const cplx& v = f.at(comp, i, j);
                write_raw(os, v.real());
                write_raw(os, v.imag());
            }
}

SpectralField load_field(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "TGF1")
        throw std::runtime_error("checkpoint: bad magic, expected TGF1");
    std::uint32_t n = 0;
    double L = 0.0;
    read_raw(is, n);
    read_raw(is, L);
    GridSpec g{static_cast<int>(n), L, 2};
    validate(g);
    SpectralField f(g);
    const int half = g.n / 2;
    for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j <= half; ++j) {
                double re = 0.0, im = 0.0;
                read_raw(is, re);
                read_raw(is, im);
                f.at(comp, i, j) = cplx(re, im);
            }
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    // reconstruct the upper half-spectrum from conjugate symmetry
    for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < g.n; ++i) {
            const int im_ = (g.n - i) % g.n;
            for (int j = half + 1; j < g.n; ++j)
                f.at(comp, i, j) = std::conj(f.at(comp, im_, g.n - j));
        }
    return f;
}

void save_field_file(const std::string& path, const SpectralField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    save_field(os, f);
}

SpectralField load_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return load_field(is);
}

std::string field_to_bytes(const SpectralField& f) {
    std::ostringstream os(std::ios::binary);
    save_field(os, f);
    return os.str();
}

}  // namespace tgf
