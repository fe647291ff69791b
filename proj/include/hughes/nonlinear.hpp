#pragma once

#include "hughes/spectral_ops.hpp"

namespace hughes {

/// Transforms of the nonlinear sources of the perturbation system at one
/// instant.
///
///   NL1 = (rho/f - 2) d_x(psi^2) + (1/f) d_x(psi^3) + div(W grad phi),
///         W = psi f^2 - 2 f (rho + psi) psi + (rho + psi) psi^2
///   NL2 = 1/2 f^2 |grad phi|^2 + 1/2 (psi^2 - 2 f psi) |grad phi|^2
///         + psi^2 / (2 f) + d_x phi (psi^2 / f - 2 psi)
///
/// NL1 is a total derivative, so its (0,0) coefficient is exactly zero.
/// Every pointwise product is formed pairwise on the 3/2-padded grid and
/// truncated back before the next multiplication.
struct NonlinearTerms {
  SpectralField nl1_hat;
  SpectralField nl2_hat;
};

/// Core evaluation from the spectra of psi and of the two components of grad phi.
inline NonlinearTerms nonlinear_terms_from_gradient(const SpectralField& psi, const SpectralField& gx,
                                                    const SpectralField& gy, const ModelParams& params) {
  require_same_grid(psi.grid(), gx.grid());
  require_same_grid(psi.grid(), gy.grid());
  const double f = params.f();
  const double r = params.rho_bar();

  const PaddedField psi_p = PaddedField::from_spectral(psi);
  const PaddedField gx_p = PaddedField::from_spectral(gx);
  const PaddedField gy_p = PaddedField::from_spectral(gy);

  const SpectralField s2 = (psi_p * psi_p).truncate();
  const SpectralField s3 = (PaddedField::from_spectral(s2) * psi_p).truncate();

  // W = (f^2 - 2 f rho) psi + (rho - 2 f) psi^2 + psi^3
  SpectralField w = (f * f - 2.0 * f * r) * psi + (r - 2.0 * f) * s2 + s3;
  const PaddedField w_p = PaddedField::from_spectral(w);
  const SpectralField wgx = (w_p * gx_p).truncate();
  const SpectralField wgy = (w_p * gy_p).truncate();

  NonlinearTerms out{(r / f - 2.0) * ddx(s2) + (1.0 / f) * ddx(s3) + ddx(wgx) + ddy(wgy), SpectralField(psi.grid())};

  PaddedField grad2_p = gx_p * gx_p;
  {
    const PaddedField gyy = gy_p * gy_p;
    auto dst = grad2_p.values();
    auto src = gyy.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const SpectralField grad2 = grad2_p.truncate();

  const SpectralField x = s2 - 2.0 * f * psi;
  const SpectralField x_grad2 = (PaddedField::from_spectral(x) * PaddedField::from_spectral(grad2)).truncate();
  const SpectralField y = (1.0 / f) * s2 - 2.0 * psi;
  const SpectralField gx_y = (gx_p * PaddedField::from_spectral(y)).truncate();

  out.nl2_hat = (0.5 * f * f) * grad2 + 0.5 * x_grad2 + (1.0 / (2.0 * f)) * s2 + gx_y;
  return out;
}

/// Nonlinear sources from the spectra of psi and phi.
inline NonlinearTerms nonlinear_terms(const SpectralField& psi_hat, const SpectralField& phi_hat,
                                      const ModelParams& params) {
  return nonlinear_terms_from_gradient(psi_hat, ddx(phi_hat), ddy(phi_hat), params);
}

inline SpectralField nl1(const RealField& psi, const RealField& grad_x, const RealField& grad_y,
                         const ModelParams& params) {
  return nonlinear_terms_from_gradient(forward_transform(psi), forward_transform(grad_x, psi.grid()),
                                       forward_transform(grad_y, psi.grid()), params)
      .nl1_hat;
}

inline SpectralField nl2(const RealField& psi, const RealField& grad_x, const RealField& grad_y,
                         const ModelParams& params) {
  return nonlinear_terms_from_gradient(forward_transform(psi), forward_transform(grad_x, psi.grid()),
                                       forward_transform(grad_y, psi.grid()), params)
      .nl2_hat;
}

}  // namespace hughes
