#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tgf/fft.hpp"
#include "tgf/grid.hpp"

namespace tgf {

/// Mean-zero, divergence-free, real-valued 2D velocity field stored as
/// truncated Fourier coefficients (full n x n complex array per component,
/// conjugate-symmetric, k=0 and Nyquist modes identically zero).
struct SpectralField {
    GridSpec grid;
    std::array<std::vector<cplx>, 2> c;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g) {
        c[0].assign(g.size(), cplx{});
        c[1].assign(g.size(), cplx{});
    }

    cplx& at(int comp, int ix, int iy) { return c[comp][static_cast<std::size_t>(ix) * grid.n + iy]; }
    const cplx& at(int comp, int ix, int iy) const {
        return c[comp][static_cast<std::size_t>(ix) * grid.n + iy];
    }
};

/// d x d matrix-valued samples on the padded physical grid; entry order
/// e[0]=11, e[1]=12, e[2]=21, e[3]=22.
struct TensorField {
    GridSpec grid;
    int m = 0;  // samples per axis (padded grid)
    std::array<std::vector<double>, 4> e;

    TensorField() = default;
    explicit TensorField(const GridSpec& g) : grid(g), m(g.pad()) {
        for (auto& v : e) v.assign(static_cast<std::size_t>(m) * m, 0.0);
    }
};

enum class NormKind { L2, V, L4, W14, Linf, Hminus1 };

// ---- linear algebra on fields -------------------------------------------

void set_zero(SpectralField& f);
void axpy(SpectralField& y, double a, const SpectralField& x);  // y += a*x
void scale(SpectralField& f, double a);
SpectralField added(const SpectralField& a, const SpectralField& b);
SpectralField subbed(const SpectralField& a, const SpectralField& b);

/// L2 inner product (f, g) = integral over the box.
double l2_inner(const SpectralField& f, const SpectralField& g);

// ---- core operations ------------------------------------------------------

/// Helmholtz/Leray projection: per mode I - kk^T/|k|^2, zero mean, Nyquist
/// cleared.  Idempotent and self-adjoint in the L2 pairing.
SpectralField leray_project(const SpectralField& raw);
void leray_project_inplace(SpectralField& f);

/// A(m) = grad m + (grad m)^T sampled on the padded grid.
TensorField sym_grad(const SpectralField& m);

double norm(const SpectralField& f, NormKind kind);
double norm(const TensorField& t, NormKind kind);

/// Reproducible divergence-free test field with per-mode amplitude
/// |k|^-exponent, normalized to unit L2 norm.  Mode amplitudes are keyed by
/// (seed, kx, ky), so refining the grid extends the spectrum without
/// changing shared modes.
SpectralField random_divfree_field(const GridSpec& grid, double exponent, std::uint64_t seed);

// ---- diagnostics ----------------------------------------------------------

/// ||div m||_2 / ||grad m||_2 (0/0 -> 0).
double relative_divergence(const SpectralField& f);
/// max_k |f(k) - conj(f(-k))|
double conjugate_symmetry_error(const SpectralField& f);
bool all_finite(const SpectralField& f);

// ---- construction helpers -------------------------------------------------

struct ModeEntry {
    int comp;
    int kx, ky;
    cplx value;
};

/// Sets the listed coefficients together with their conjugate mirror modes.
SpectralField field_from_modes(const GridSpec& grid, const std::vector<ModeEntry>& entries);

/// gamma * (sin(k0 x) cos(k0 y), -cos(k0 x) sin(k0 y)) on the box.
SpectralField taylor_green(const GridSpec& grid, double gamma);

// ---- checkpoint format ("TGF1") --------------------------------------------
// magic "TGF1", little-endian u32 n, f64 L, then for each component the
// n x (n/2+1) half-spectrum row-major as interleaved f64 (re, im) pairs.

void save_field(std::ostream& os, const SpectralField& f);
SpectralField load_field(std::istream& is);
void save_field_file(const std::string& path, const SpectralField& f);
SpectralField load_field_file(const std::string& path);
std::string field_to_bytes(const SpectralField& f);

}  // namespace tgf
