#pragma once

#include <cstdint>
#include <vector>

#include "tgf/field.hpp"

namespace tgf {

/// Validated material parameters together with the derived constants used by
/// the stability estimates.
struct FluidParams {
    double nu = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
    double lambda = 1.0;       // Poincare constant of the domain
    double md_estimate = 1.0;  // empirical constant in ||u||_inf <= M ||A(u)||_4
    int dim = 2;
    // derived
    double eps0 = 1.0;
    double nu_star = 1.0;
    double beta_star = 1.0;
};

/// Checks nu > 0, beta > 0, |alpha| < sqrt(2 nu beta) and fills the derived
/// constants; eps0 = 1 (alpha = 0) is accepted.
FluidParams make_params(double nu, double alpha, double beta, double lambda, double md_estimate,
                        int dim = 2);

/// Shares the transforms of m and grad m between the three nonlinear terms.
/// All outputs are Leray-projected spectral fields on the n-grid.
class NonlinearTerms {
  public:
    explicit NonlinearTerms(const GridSpec& g);

    /// conv = P[(m.grad)m], jterm = -P div(A A), kterm = -P div(|A|^2 A).
    /// Null pointers skip the corresponding term.
    void eval(const SpectralField& m, SpectralField* conv, SpectralField* jterm,
              SpectralField* kterm);

    /// max_x |A(m)(x)| from the latest eval (Frobenius magnitude)
    double last_a_linf() const { return last_a_linf_; }

  private:
    GridSpec g_;
    PaddedTransform tr_;
    std::size_t np_;
    std::vector<double> m1_, m2_, dx1_, dy1_, dx2_, dy2_;
    std::vector<double> w1_, w2_, w3_, w4_, w5_, w6_;
    std::vector<cplx> h1_, h2_, h3_, h4_, h5_, h6_;
    double last_a_linf_ = 0.0;
};

// ---- the constitutive operators --------------------------------------------

/// Stokes operator: per-mode multiplication by |kappa|^2.
SpectralField op_stokes(const SpectralField& m);

/// b(p,m,u) = integral (p.grad)m . u, dealiased quadrature.
double trilinear_b(const SpectralField& p, const SpectralField& m, const SpectralField& u);

SpectralField apply_convection(const SpectralField& m);
SpectralField apply_J(const SpectralField& m);
SpectralField apply_K(const SpectralField& m);

/// G(m) = nu*A m + B(m) + alpha*J(m) + beta*K(m), composed in exactly this
/// order.
SpectralField apply_G(const SpectralField& m, const FluidParams& p);

struct MonotonicityGap {
    double lhs = 0.0;     // <G(m1)-G(m2), m1-m2> + (M^2/4 nu eps0) ||A(m2)||_4^2 ||m1-m2||_2^2
    double rhs_l2 = 0.0;  // (nu eps0/4) ||A(m1-m2)||_2^2
    double rhs_l4 = 0.0;  // (beta eps0/4) ||A(m1-m2)||_4^4
    double slack = 0.0;   // lhs - rhs_l2 - rhs_l4
};
MonotonicityGap monotonicity_gap(const SpectralField& m1, const SpectralField& m2,
                                 const FluidParams& p);

/// ||m||_inf / ||A(m)||_4 (the ratio whose sup defines M_d).
double md_ratio(const SpectralField& m);

/// Running max of md_ratio over `trials` random band-limited fields,
/// inflated by the safety factor 1.5.  Deterministic per seed.
double estimate_md(const GridSpec& grid, int trials, std::uint64_t seed);

/// Smallness margin: rho = nu eps0 lambda
///   - (M^2 / 2 nu eps0) (1/(beta* nu*))^{1/2} (1/2 + 1/(nu* lambda))^{1/2} ||g||_{H^-1}.
double compute_rho(const FluidParams& p, const SpectralField& g);

}  // namespace tgf
