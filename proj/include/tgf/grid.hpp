#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tgf {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Periodic box [0,L]^2 discretized with n Fourier modes per axis.
///
/// Nonlinear products are evaluated on a zero-padded grid of pad() = dealias*n
/// points per axis.  With the Nyquist column zeroed the retained modes satisfy
/// |k| <= n/2-1, so cubic products (highest mode 3(n/2-1)) land below the
/// padded grid's aliasing threshold and quartic integrands are integrated
/// exactly by the trapezoidal sum.
struct GridSpec {
    int n = 64;
    double L = kTwoPi;
    int dealias = 2;

    int pad() const { return dealias * n; }
    int kmax() const { return n / 2 - 1; }
    double kappa0() const { return kTwoPi / L; }          // lowest wavenumber
    double lambda_poincare() const { return kappa0() * kappa0(); }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }

    // index <-> integer wavenumber along one axis
    int wavenumber(int idx) const { return idx <= n / 2 ? idx : idx - n; }
    int index_of(int k) const { return k >= 0 ? k : k + n; }

    bool operator==(const GridSpec& o) const {
        return n == o.n && L == o.L && dealias == o.dealias;
    }
};

inline void validate(const GridSpec& g) {
    if (g.n < 8 || g.n % 2 != 0)
        throw std::invalid_argument("grid.n must be even and >= 8, got " + std::to_string(g.n));
    if (!(g.L > 0.0)) throw std::invalid_argument("grid.length must be positive");
    if (g.dealias < 2)
        throw std::invalid_argument("grid.dealias must be >= 2 so cubic terms are alias-free");
}

}  // namespace tgf
