#pragma once

#include <complex>
#include <vector>

#include "tgf/grid.hpp"

namespace tgf {

using cplx = std::complex<double>;

namespace fft {

/// In-place 2D complex DFT of an m x m row-major array.
/// sign = -1 analysis (FFTW_FORWARD), +1 synthesis (FFTW_BACKWARD), unnormalized.
/// Plans are cached per (m, sign) and created with FFTW_ESTIMATE so repeated
/// runs are bitwise identical.
void dft_2d(cplx* data, int m, int sign);

}  // namespace fft

/// Transforms between truncated spectral coefficients on the n-grid and
/// physical samples on the padded pad() x pad() grid.  Two real fields ride in
/// one complex transform (one in the real part, one in the imaginary part);
/// the unpack on the way back symmetrizes, so outputs are exactly
/// conjugate-symmetric with the Nyquist modes zeroed.
class PaddedTransform {
  public:
    explicit PaddedTransform(const GridSpec& g);

    /// coefficients (optionally multiplied per mode by fa/fb, e.g. ik for
    /// derivatives) -> physical samples. b may be null (single field).
    void to_physical(const cplx* a, const cplx* fa, double* pa, const cplx* b, const cplx* fb,
                     double* pb);

    /// physical samples -> truncated coefficients (mean retained; caller
    /// projects).  b/pb may be null.
    void to_spectral(const double* pa, double* /*unused*/, const double* pb, cplx* a, cplx* b);

    int mpad() const { return m_; }

  private:
    GridSpec g_;
    int m_;
    std::vector<cplx> buf_;
    std::vector<int> embed_;  // axis index on n-grid -> axis index on pad grid
    std::vector<int> neg_;    // axis index of -k on n-grid
};

/// Per-mode factor tables for a grid: i*kappa_x, i*kappa_y and |kappa|^2.
struct SpectralTables {
    std::vector<cplx> ikx, iky;
    std::vector<double> k2;  // |kappa|^2
};

const SpectralTables& tables(const GridSpec& g);

}  // namespace tgf
