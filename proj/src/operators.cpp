#include "tgf/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tgf/rng.hpp"

namespace tgf {

FluidParams make_params(double nu, double alpha, double beta, double lambda, double md_estimate,
                        int dim) {
    if (!(nu > 0.0)) throw std::invalid_argument("params: nu must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("params: beta must be positive");
    if (!(std::abs(alpha) < std::sqrt(2.0 * nu * beta)))
        throw std::invalid_argument(
            "params: material moduli must satisfy |alpha| < sqrt(2*nu*beta); got alpha = " +
            std::to_string(alpha) + ", sqrt(2*nu*beta) = " + std::to_string(std::sqrt(2.0 * nu * beta)));
    if (!(lambda > 0.0)) throw std::invalid_argument("params: lambda must be positive");
    if (!(md_estimate > 0.0)) throw std::invalid_argument("params: md_estimate must be positive");
    if (dim != 2 && dim != 3) throw std::invalid_argument("params: dim must be 2 or 3");
    FluidParams p;
    p.nu = nu;
    p.alpha = alpha;
    p.beta = beta;
    p.lambda = lambda;
    p.md_estimate = md_estimate;
    p.dim = dim;
    p.eps0 = 1.0 - std::sqrt(alpha * alpha / (2.0 * beta * nu));
    if (dim == 2) {
        p.nu_star = nu;
        p.beta_star = beta;
    } else {
        p.nu_star = 0.5 * nu * (1.0 + p.eps0);
        p.beta_star = beta * p.eps0;
    }
    return p;
}

NonlinearTerms::NonlinearTerms(const GridSpec& g) : g_(g), tr_(g) {
    np_ = static_cast<std::size_t>(g.pad()) * g.pad();
    for (auto* v : {&m1_, &m2_, &dx1_, &dy1_, &dx2_, &dy2_, &w1_, &w2_, &w3_, &w4_, &w5_, &w6_})
        v->assign(np_, 0.0);
    for (auto* v : {&h1_, &h2_, &h3_, &h4_, &h5_, &h6_}) v->assign(g.size(), cplx{});
}

void NonlinearTerms::eval(const SpectralField& m, SpectralField* conv, SpectralField* jterm,
                          SpectralField* kterm) {
    const SpectralTables& t = tables(g_);
    tr_.to_physical(m.c[0].data(), nullptr, m1_.data(), m.c[1].data(), nullptr, m2_.data());
    tr_.to_physical(m.c[0].data(), t.ikx.data(), dx1_.data(), m.c[0].data(), t.iky.data(),
                    dy1_.data());
    tr_.to_physical(m.c[1].data(), t.ikx.data(), dx2_.data(), m.c[1].data(), t.iky.data(),
                    dy2_.data());

    double amax = 0.0;
    for (std::size_t s = 0; s < np_; ++s) {
        const double a11 = 2.0 * dx1_[s];
        const double a12 = dy1_[s] + dx2_[s];
        const double a22 = 2.0 * dy2_[s];
        const double q = a11 * a11 + 2.0 * a12 * a12 + a22 * a22;  // |A|^2
        amax = std::max(amax, q);
        w1_[s] = q * a11;                  // S11
        w2_[s] = q * a12;                  // S12
        w3_[s] = q * a22;                  // S22
        w4_[s] = a11 * a11 + a12 * a12;    // B11 = (A A)_11
        w5_[s] = a12 * (a11 + a22);        // B12
        w6_[s] = a12 * a12 + a22 * a22;    // B22
    }
    last_a_linf_ = std::sqrt(amax);

    if (kterm) {
        tr_.to_spectral(w1_.data(), nullptr, w2_.data(), h1_.data(), h2_.data());  // S11, S12
    }
    if (kterm || jterm) {
        tr_.to_spectral(w3_.data(), nullptr, w4_.data(), h3_.data(), h4_.data());  // S22, B11
    }
    if (jterm) {
        tr_.to_spectral(w5_.data(), nullptr, w6_.data(), h5_.data(), h6_.data());  // B12, B22
    }

    if (conv) {
        // (m.grad)m reuses w1_, w2_ as scratch after S has been transformed
        for (std::size_t s = 0; s < np_; ++s) {
            w1_[s] = m1_[s] * dx1_[s] + m2_[s] * dy1_[s];
            w2_[s] = m1_[s] * dx2_[s] + m2_[s] * dy2_[s];
        }
        *conv = SpectralField(g_);
        tr_.to_spectral(w1_.data(), nullptr, w2_.data(), conv->c[0].data(), conv->c[1].data());
        leray_project_inplace(*conv);
    }
    if (kterm) {
        *kterm = SpectralField(g_);
        for (std::size_t s = 0; s < g_.size(); ++s) {
            kterm->c[0][s] = -(t.ikx[s] * h1_[s] + t.iky[s] * h2_[s]);
            kterm->c[1][s] = -(t.ikx[s] * h2_[s] + t.iky[s] * h3_[s]);
        }
        leray_project_inplace(*kterm);
    }
    if (jterm) {
        *jterm = SpectralField(g_);
        for (std::size_t s = 0; s < g_.size(); ++s) {
            jterm->c[0][s] = -(t.ikx[s] * h4_[s] + t.iky[s] * h5_[s]);
            jterm->c[1][s] = -(t.ikx[s] * h5_[s] + t.iky[s] * h6_[s]);
        }
        leray_project_inplace(*jterm);
    }
}

SpectralField op_stokes(const SpectralField& m) {
    const SpectralTables& t = tables(m.grid);
    SpectralField r = m;
    for (int comp = 0; comp < 2; ++comp)
        for (std::size_t s = 0; s < r.c[comp].size(); ++s) r.c[comp][s] *= t.k2[s];
    return r;
}

double trilinear_b(const SpectralField& p, const SpectralField& m, const SpectralField& u) {
    const GridSpec& g = m.grid;
    if (!(p.grid == g) || !(u.grid == g)) throw std::invalid_argument("trilinear_b: grid mismatch");
    const SpectralTables& t = tables(g);
    PaddedTransform tr(g);
    const std::size_t np = static_cast<std::size_t>(g.pad()) * g.pad();
    std::vector<double> p1(np), p2(np), u1(np), u2(np), dx1(np), dy1(np), dx2(np), dy2(np);
    tr.to_physical(p.c[0].data(), nullptr, p1.data(), p.c[1].data(), nullptr, p2.data());
    tr.to_physical(u.c[0].data(), nullptr, u1.data(), u.c[1].data(), nullptr, u2.data());
    tr.to_physical(m.c[0].data(), t.ikx.data(), dx1.data(), m.c[0].data(), t.iky.data(), dy1.data());
    tr.to_physical(m.c[1].data(), t.ikx.data(), dx2.data(), m.c[1].data(), t.iky.data(), dy2.data());
    double s = 0.0;
    for (std::size_t i = 0; i < np; ++i)
        s += (p1[i] * dx1[i] + p2[i] * dy1[i]) * u1[i] + (p1[i] * dx2[i] + p2[i] * dy2[i]) * u2[i];
    const double h = g.L / g.pad();
    return s * h * h;
}

SpectralField apply_convection(const SpectralField& m) {
    NonlinearTerms nl(m.grid);
    SpectralField conv;
    nl.eval(m, &conv, nullptr, nullptr);
    return conv;
}

SpectralField apply_J(const SpectralField& m) {
    NonlinearTerms nl(m.grid);
    SpectralField j;
    nl.eval(m, nullptr, &j, nullptr);
    return j;
}

SpectralField apply_K(const SpectralField& m) {
    NonlinearTerms nl(m.grid);
    SpectralField k;
    nl.eval(m, nullptr, nullptr, &k);
    return k;
}

SpectralField apply_G(const SpectralField& m, const FluidParams& p) {
    NonlinearTerms nl(m.grid);
    SpectralField conv, jt, kt;
    nl.eval(m, &conv, &jt, &kt);
    SpectralField g = op_stokes(m);
    scale(g, p.nu);
    axpy(g, 1.0, conv);
    axpy(g, p.alpha, jt);
    axpy(g, p.beta, kt);
    return g;
}

MonotonicityGap monotonicity_gap(const SpectralField& m1, const SpectralField& m2,
                                 const FluidParams& p) {
    const SpectralField y = subbed(m1, m2);
    const SpectralField gd = subbed(apply_G(m1, p), apply_G(m2, p));
    const double a2_l4 = norm(sym_grad(m2), NormKind::L4);
    const double y_l2 = norm(y, NormKind::L2);
    const TensorField ay = sym_grad(y);
    const double ay_l2 = norm(ay, NormKind::L2);
    const double ay_l4 = norm(ay, NormKind::L4);
    const double md = p.md_estimate;
    MonotonicityGap r;
    r.lhs = l2_inner(gd, y) + md * md / (4.0 * p.nu * p.eps0) * a2_l4 * a2_l4 * y_l2 * y_l2;
    r.rhs_l2 = 0.25 * p.nu * p.eps0 * ay_l2 * ay_l2;
    r.rhs_l4 = 0.25 * p.beta * p.eps0 * ay_l4 * ay_l4 * ay_l4 * ay_l4;
    r.slack = r.lhs - r.rhs_l2 - r.rhs_l4;
    return r;
}

double md_ratio(const SpectralField& m) {
    const double denom = norm(sym_grad(m), NormKind::L4);
    if (denom == 0.0) return 0.0;
    return norm(m, NormKind::Linf) / denom;
}

double estimate_md(const GridSpec& grid, int trials, std::uint64_t seed) {
    if (trials < 100) throw std::invalid_argument("estimate_md: need at least 100 trials");
    static const double kExponents[] = {1.5, 2.0, 2.5, 3.0};
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double e = kExponents[t % 4];
        const std::uint64_t s = rng::stream_key(seed, rng::Stream::MdTrial, t);
        best = std::max(best, md_ratio(random_divfree_field(grid, e, s)));
    }
    return 1.5 * best;
}

double compute_rho(const FluidParams& p, const SpectralField& g) {
    const double gh = norm(g, NormKind::Hminus1);
    const double md2 = p.md_estimate * p.md_estimate;
    return p.nu * p.eps0 * p.lambda -
           md2 / (2.0 * p.nu * p.eps0) * std::sqrt(1.0 / (p.beta_star * p.nu_star)) *
               std::sqrt(0.5 + 1.0 / (p.nu_star * p.lambda)) * gh;
}

}  // namespace tgf
