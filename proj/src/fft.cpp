#include "tgf/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

namespace tgf {
namespace fft {

namespace {

std::mutex g_plan_mutex;

fftw_plan plan_for(int m, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(m, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // UNALIGNED lets the cached plan run on any caller buffer via new-array execute
    fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(m) * m);
    fftw_plan p = fftw_plan_dft_2d(m, m, tmp, tmp, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(tmp);
    cache.emplace(key, p);
    return p;
}

}  // namespace

void dft_2d(cplx* data, int m, int sign) {
    fftw_plan p = plan_for(m, sign);
    fftw_complex* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

}  // namespace fft

PaddedTransform::PaddedTransform(const GridSpec& g) : g_(g), m_(g.pad()) {
    buf_.resize(static_cast<std::size_t>(m_) * m_);
    embed_.resize(g.n);
    neg_.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const int k = g.wavenumber(i);
        embed_[i] = (k + m_) % m_;
        neg_[i] = (g.n - i) % g.n;
    }
}

void PaddedTransform::to_physical(const cplx* a, const cplx* fa, double* pa, const cplx* b,
                                  const cplx* fb, double* pb) {
    const int n = g_.n;
    std::fill(buf_.begin(), buf_.end(), cplx{});
    const cplx iunit(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        const std::size_t braw = static_cast<std::size_t>(embed_[i]) * m_;
        const std::size_t arow = static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            cplx v = a[arow + j];
            if (fa) v *= fa[arow + j];
            if (b) {
                cplx w = b[arow + j];
                if (fb) w *= fb[arow + j];
                v += iunit * w;
            }
            buf_[braw + embed_[j]] = v;
        }
    }
    fft::dft_2d(buf_.data(), m_, +1);
    const std::size_t np = buf_.size();
    if (pb) {
        for (std::size_t s = 0; s < np; ++s) {
            pa[s] = buf_[s].real();
            pb[s] = buf_[s].imag();
        }
    } else {
        for (std::size_t s = 0; s < np; ++s) pa[s] = buf_[s].real();
    }
}

void PaddedTransform::to_spectral(const double* pa, double*, const double* pb, cplx* a, cplx* b) {
    const int n = g_.n;
    const std::size_t np = buf_.size();
    if (pb) {
        for (std::size_t s = 0; s < np; ++s) buf_[s] = cplx(pa[s], pb[s]);
    } else {
        for (std::size_t s = 0; s < np; ++s) buf_[s] = cplx(pa[s], 0.0);
    }
    fft::dft_2d(buf_.data(), m_, -1);
    const double inv = 1.0 / (static_cast<double>(m_) * m_);
    const int half = n / 2;
    for (int i = 0; i < n; ++i) {
        const std::size_t arow = static_cast<std::size_t>(i) * n;
        const std::size_t prow = static_cast<std::size_t>(embed_[i]) * m_;
        const std::size_t mrow = static_cast<std::size_t>(embed_[neg_[i]]) * m_;
        for (int j = 0; j < n; ++j) {
            if (i == half || j == half) {  // Nyquist stays empty
                a[arow + j] = cplx{};
                if (b) b[arow + j] = cplx{};
                continue;
            }
            const cplx hp = buf_[prow + embed_[j]];
            const cplx hm = std::conj(buf_[mrow + embed_[neg_[j]]]);
            a[arow + j] = 0.5 * inv * (hp + hm);
            if (b) b[arow + j] = cplx(0.0, -0.5) * inv * (hp - hm);
        }
    }
}

const SpectralTables& tables(const GridSpec& g) {
    static std::map<std::pair<int, double>, SpectralTables> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(g.n, g.L);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    SpectralTables t;
    t.ikx.resize(g.size());
    t.iky.resize(g.size());
    t.k2.resize(g.size());
    const double k0 = g.kappa0();
    for (int i = 0; i < g.n; ++i) {
        const double kx = k0 * g.wavenumber(i);
        for (int j = 0; j < g.n; ++j) {
            const double ky = k0 * g.wavenumber(j);
            const std::size_t s = static_cast<std::size_t>(i) * g.n + j;
            t.ikx[s] = cplx(0.0, kx);
            t.iky[s] = cplx(0.0, ky);
            t.k2[s] = kx * kx + ky * ky;
        }
    }
    return cache.emplace(key, std::move(t)).first->second;
}

}  // namespace tgf
