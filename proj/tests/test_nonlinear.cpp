#include <gtest/gtest.h>

#include <random>

#include "hughes/picard.hpp"
#include "support.hpp"

using namespace hughes;
using hughes::testing::gaussian;
using hughes::testing::subcritical;

namespace {

RealField product(const RealField& a, const RealField& b) {
  RealField out(a.grid());
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
  return out;
}

RealField lin(double a, const RealField& x, double b, const RealField& y) {
  RealField out(x.grid());
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] = a * x.values()[i] + b * y.values()[i];
  return out;
}

// Nonlinear terms with plain pointwise products: exact when every product is
// resolved on the grid (band-limited inputs with small support).
NonlinearTerms direct_terms(const SpectralField& psi_hat, const SpectralField& phi_hat, const ModelParams& p) {
  const double f = p.f(), r = p.rho_bar();
  const RealField psi = inverse_transform(psi_hat);
  const RealField gx = inverse_transform(ddx(phi_hat));
  const RealField gy = inverse_transform(ddy(phi_hat));
  const RealField s2 = product(psi, psi);
  const RealField s3 = product(s2, psi);
  RealField w = lin(f * f - 2 * f * r, psi, r - 2 * f, s2);
  w = lin(1.0, w, 1.0, s3);
  const RealField grad2 = lin(1.0, product(gx, gx), 1.0, product(gy, gy));
  const auto F = [](const RealField& x) { return forward_transform(x); };
  SpectralField nl1 = (r / f - 2.0) * ddx(F(s2)) + (1.0 / f) * ddx(F(s3)) + ddx(F(product(w, gx))) +
                      ddy(F(product(w, gy)));
  const RealField x = lin(1.0, s2, -2.0 * f, psi);
  const RealField y = lin(1.0 / f, s2, -2.0, psi);
  SpectralField nl2 = (0.5 * f * f) * F(grad2) + 0.5 * F(product(x, grad2)) + (0.5 / f) * F(s2) + F(product(gx, y));
  return {nl1, nl2};
}

StateTrajectory solve_gaussian(double amplitude, const ModelParams& p, PicardConfig cfg, int n = 32, double L = 32.0,
                               double w = 4.0) {
  const GridSpec g(n, L);
  const SpectralField psi0 = forward_transform(gaussian(g, amplitude, w));
  const SpectralField phiT = forward_transform(gaussian(g, 0.5 * amplitude, w));
  return picard_solve(psi0, phiT, cfg, p);
}

}  // namespace

TEST(NonlinearTerms, VanishWithoutPerturbation) {
  const GridSpec g(16, 10.0);
  const auto p = subcritical();
  const RealField zero(g);
  EXPECT_EQ(nl1(zero, zero, zero, p).max_abs(), 0.0);
  EXPECT_EQ(nl2(zero, zero, zero, p).max_abs(), 0.0);
  const RealField c = RealField::sample(g, [](double, double) { return 0.01; });
  EXPECT_LT(nl1(c, zero, zero, p).max_abs(), 1e-20);
}

TEST(NonlinearTerms, CosineOracle) {
  const GridSpec g(32, 7.0);
  const auto p = subcritical();
  const double f = p.f(), r = p.rho_bar(), e = 1e-2;
  const double k = 2.0 * std::numbers::pi / g.length();
  const RealField psi = RealField::sample(g, [&](double x, double) { return e * std::cos(k * x); });
  const RealField zero(g);
  // d/dx(psi^2) = -e^2 k sin(2kx); d/dx(psi^3) = -3 e^3 k (sin kx + sin 3kx) / 4
  const RealField ref1 = RealField::sample(g, [&](double x, double) {
    return (r / f - 2.0) * (-e * e * k * std::sin(2 * k * x)) +
           (1.0 / f) * (-0.75 * e * e * e * k * (std::sin(k * x) + std::sin(3 * k * x)));
  });
  const SpectralField a = nl1(psi, zero, zero, p);
  const SpectralField b = forward_transform(ref1);
  EXPECT_LE((a - b).max_abs(), 1e-10 * b.max_abs());
  // psi^2 / (2f) = e^2 (1 + cos 2kx) / (4f)
  const RealField ref2 =
      RealField::sample(g, [&](double x, double) { return e * e * (1 + std::cos(2 * k * x)) / (4 * f); });
  const SpectralField c = nl2(psi, zero, zero, p);
  const SpectralField d = forward_transform(ref2);
  EXPECT_LE((c - d).max_abs(), 1e-10 * d.max_abs());
  EXPECT_EQ(a[0], cplx(0.0));
}

TEST(NonlinearTerms, GradientOnlyTerm) {
  const GridSpec g(32, 9.0);
  const auto p = subcritical();
  const double k = 2.0 * std::numbers::pi / g.length();
  const RealField gx = RealField::sample(g, [&](double x, double y) { return 0.3 * std::sin(k * x + 2 * k * y); });
  const RealField zero(g);
  const RealField ref = RealField::sample(g, [&](double x, double y) {
    const double v = 0.3 * std::sin(k * x + 2 * k * y);
    return 0.5 * p.f() * p.f() * v * v;
  });
  const SpectralField got = nl2(zero, gx, zero, p);
  EXPECT_LE((got - forward_transform(ref)).max_abs(), 1e-14);
}

TEST(NonlinearTerms, DealiasedMatchesResolvedDirectProducts) {
  // Quartic products of |k| <= 3 fields stay below n/2 = 16.
  const GridSpec g(32, 11.0);
  const auto p = subcritical();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralField psi = hughes::testing::random_band_limited(g, rng, 3, 0.05);
    const SpectralField phi = hughes::testing::random_band_limited(g, rng, 3, 0.05);
    const NonlinearTerms a = nonlinear_terms(psi, phi, p);
    const NonlinearTerms b = direct_terms(psi, phi, p);
    EXPECT_LE((a.nl1_hat - b.nl1_hat).max_abs(), 1e-13 * b.nl1_hat.max_abs());
    EXPECT_LE((a.nl2_hat - b.nl2_hat).max_abs(), 1e-13 * b.nl2_hat.max_abs());
    EXPECT_EQ(a.nl1_hat[0], cplx(0.0));
    EXPECT_LE(a.nl1_hat.hermitian_defect(), 1e-16);
    EXPECT_LE(a.nl2_hat.hermitian_defect(), 1e-16);
  }
}

TEST(ExponentialIntegrator, PhiFunctionsAcrossTheSeriesSwitch) {
  for (cplx z : {cplx(1e-9, 0), cplx(0.3, -0.2), cplx(-0.99, 0.01), cplx(-1.01, 0.0), cplx(-5.0, 3.0), cplx(0, 2)}) {
    const auto [p1, p2] = detail::phi_functions(z);
    // direct formulas in long double as reference
    const std::complex<long double> zl(z.real(), z.imag());
    const auto ez = std::exp(zl);
    const auto r1 = (ez - 1.0L) / zl;
    const auto r2 = (ez - 1.0L - zl) / (zl * zl);
    // the closed forms cancel catastrophically near 0; use the leading series terms there
    const cplx ref1 = std::abs(z) < 1e-3 ? 1.0 + z / 2.0 + z * z / 6.0 : cplx(r1);
    const cplx ref2 = std::abs(z) < 1e-3 ? 0.5 + z / 6.0 + z * z / 24.0 : cplx(r2);
    EXPECT_LT(std::abs(p1 - ref1), 1e-13 * std::abs(ref1));
    EXPECT_LT(std::abs(p2 - ref2), 1e-13 * std::abs(ref2));
  }
  const auto [q1, q2] = detail::phi_functions(cplx(0.0));
  EXPECT_EQ(q1, cplx(1.0));
  EXPECT_EQ(q2, cplx(0.5));
}

TEST(ExponentialIntegrator, ConstantAndLinearSourcesIntegrateExactly) {
  const auto es = eigensystem({0.7, -0.4}, subcritical());
  const double h = 0.0625;
  const int steps = 160;
  const auto w = detail::exponential_trapezoid(es.lambda1, h);
  const cplx decay = std::exp(es.lambda1 * h);
  const cplx g(0.3, -1.1);
  cplx F = 0.0, Flin = 0.0;
  for (int j = 0; j < steps; ++j) {
    F = decay * F + (w[0] + w[1]) * g;
    Flin = decay * Flin + w[0] * (j * h) + w[1] * ((j + 1) * h);
  }
  const double t = steps * h;
  const cplx l = es.lambda1;
  EXPECT_LT(std::abs(F - (std::exp(l * t) - 1.0) / l * g), 1e-10);
  // int_0^t e^{l (t-s)} s ds = (e^{lt} - 1 - l t) / l^2
  EXPECT_LT(std::abs(Flin - (std::exp(l * t) - 1.0 - l * t) / (l * l)), 1e-10);
}

TEST(WeightedNorm, BasicValues) {
  const GridSpec g(16, 2.0 * std::numbers::pi);
  const double T = 4.0, c = 0.3, k = 3.0;
  const auto times = uniform_nodes(9, T);
  std::vector<SpectralField> zero(times.size(), SpectralField(g));
  EXPECT_EQ(weighted_norm(zero, times, k, c, T), 0.0);
  std::vector<SpectralField> one = zero;
  const double xi = 2.0;
  for (std::size_t j = 0; j < times.size(); ++j) one[j].set_mode(2, 0, std::exp(-c * xi * times[j]));
  const double expected_t0 = std::pow(1 + xi, k) / (1 + std::exp(-c * xi * T));
  std::vector<SpectralField> first{one[0]};
  const std::vector<double> t0{0.0};
  EXPECT_NEAR(weighted_norm(first, t0, k, c, T), expected_t0, 1e-12 * expected_t0);
  EXPECT_LE(weighted_norm(one, times, k, c, T), std::pow(1 + xi, k) * (1 + 1e-12));
  EXPECT_GE(weighted_norm(one, times, k + 1, c, T), weighted_norm(one, times, k, c, T));
  EXPECT_THROW(weighted_norm(one, times, 2.0, c, T), InvalidParams);
  EXPECT_THROW(weighted_norm(one, times, k, 0.0, T), InvalidParams);
}

TEST(WeightedNorm, KernelProductBoundWithConstantFour) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0), comp(-20.0, 20.0);
  int violations = 0;
  for (int i = 0; i < 100000; ++i) {
    const double T = 200.0 * u(rng) + 1e-3, t = T * u(rng), c = 2.0 * u(rng);
    const Vec2 nu{comp(rng), comp(rng)}, xi{comp(rng), comp(rng)};
    const Vec2 d{xi[0] - nu[0], xi[1] - nu[1]};
    auto kern = [&](const Vec2& v) { return std::exp(-c * norm(v) * t) + std::exp(-c * norm(v) * (T - t)); };
    if (kern(nu) * kern(d) > 4.0 * kern(xi)) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

// Exact spectral convolution of fields supported in |kx|, |ky| <= kmax. An FFT
// product would spread roundoff to every mode, where the weight e^{c|xi|T/2}
// amplifies it.
SpectralField convolve(const SpectralField& a, const SpectralField& b, int kmax) {
  SpectralField out(a.grid());
  for (int kx = 0; kx <= 2 * kmax; ++kx)
    for (int ky = -2 * kmax; ky <= 2 * kmax; ++ky) {
      if (kx == 0 && ky < 0) continue;
      cplx sum = 0.0;
      for (int nx = -kmax; nx <= kmax; ++nx)
        for (int ny = -kmax; ny <= kmax; ++ny) {
          const int mx = kx - nx, my = ky - ny;
          if (std::abs(mx) > kmax || std::abs(my) > kmax) continue;
          sum += a.at(nx, ny) * b.at(mx, my);
        }
      out.set_mode(kx, ky, sum);
    }
  return out;
}

TEST(WeightedNorm, ProductConstantIsHorizonIndependent) {
  const GridSpec g(16, 2.0 * std::numbers::pi);
  const double c = 0.2, k = 3.0;
  std::vector<double> worst;
  for (double T : {1.0, 10.0, 100.0}) {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto times = uniform_nodes(17, T);
    double m = 0.0;
    for (int pair = 0; pair < 100; ++pair) {
      std::vector<SpectralField> fh, gh, prod;
      SpectralField a(g), b(g);
      for (int kx = 0; kx <= 3; ++kx)
        for (int ky = -3; ky <= 3; ++ky) {
          if (kx == 0 && ky <= 0) continue;
          a.set_mode(kx, ky, {u(rng), u(rng)});
          b.set_mode(kx, ky, {u(rng), u(rng)});
        }
      for (double t : times) {
        auto shape = [&](const SpectralField& base) {
          return apply_symbol(base, [&](const Vec2& xi) {
            const double kk = norm(xi);
            return cplx((std::exp(-c * kk * t) + std::exp(-c * kk * (T - t))) / std::pow(1 + kk, k), 0.0);
          });
        };
        fh.push_back(shape(a));
        gh.push_back(shape(b));
        prod.push_back(convolve(fh.back(), gh.back(), 3));
      }
      const double ratio = weighted_norm(prod, times, k, c, T) /
                           (weighted_norm(fh, times, k, c, T) * weighted_norm(gh, times, k, c, T));
      m = std::max(m, ratio);
    }
    worst.push_back(m);
  }
  const double hi = *std::max_element(worst.begin(), worst.end());
  const double lo = *std::min_element(worst.begin(), worst.end());
  EXPECT_LT(hi / lo, 2.0);
}

TEST(WeightedNorm, DuhamelIntegralConstantIsHorizonIndependent) {
  // sup over xi, t of weight * |int_0^t e^{-2c|xi|(t-s)} |xi| f(xi, s) ds| for ||f|| <= 1
  const double c = 0.2, k = 3.0;
  auto worst = [&](double T) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int M = static_cast<int>(64 * T) + 1;
    const double h = T / (M - 1);
    double out = 0.0;
    for (double xi : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      std::vector<double> fvals(M);
      for (int j = 0; j < M; ++j) {
        const double s = j * h;
        fvals[j] = u(rng) * (std::exp(-c * xi * s) + std::exp(-c * xi * (T - s))) / std::pow(1 + xi, k);
      }
      double I = 0.0;
      const double decay = std::exp(-2 * c * xi * h);
      for (int j = 1; j < M; ++j) {
        I = decay * I + 0.5 * h * xi * (decay * fvals[j - 1] + fvals[j]);
        out = std::max(out, std::abs(I) * norm_weight(xi, j * h, k, c, T));
      }
    }
    return out;
  };
  const double a = worst(10.0), b = worst(20.0);
  EXPECT_LT(std::max(a, b) / std::min(a, b), 2.0);
}

TEST(Duhamel, ZeroDataIsFixed) {
  const GridSpec g(16, 16.0);
  const auto p = subcritical();
  PicardConfig cfg = PicardConfig::defaults(p);
  cfg.time_nodes = 33;
  const SpectralField zero(g);
  const StateTrajectory lin = linear_state(zero, zero, cfg, p);
  const StateTrajectory next = duhamel_step(lin, zero, zero, cfg, p);
  for (std::size_t j = 0; j < next.times.size(); ++j) {
    EXPECT_EQ(next.psi_hat[j].max_abs(), 0.0);
    EXPECT_EQ(next.phi_hat[j].max_abs(), 0.0);
  }
  EXPECT_EQ(next.iteration_report.back(), 0.0);
}

TEST(Duhamel, BoundaryValuesEnforcedForAnySource) {
  const GridSpec g(32, 20.0);
  const auto p = subcritical(0.0, 5.0);
  PicardConfig cfg = PicardConfig::defaults(p);
  cfg.time_nodes = 41;
  std::mt19937_64 rng(8);
  const SpectralField psi0 = hughes::testing::random_band_limited(g, rng, 6, 0.3);
  const SpectralField phiT = hughes::testing::random_band_limited(g, rng, 6, 0.3);
  const StateTrajectory lin = linear_state(psi0, phiT, cfg, p);
  const StateTrajectory next = duhamel_step(lin, psi0, phiT, cfg, p);
  EXPECT_LE((next.psi_hat.front() - psi0).max_abs(), 1e-12 * psi0.max_abs());
  EXPECT_LE((next.phi_hat.back() - phiT).max_abs(), 1e-12 * phiT.max_abs());
  EXPECT_GT(next.iteration_report.back(), 1e-3);  // the source is far from negligible
  for (const auto& f : next.psi_hat) EXPECT_EQ(f[0], psi0[0]);
}

TEST(Duhamel, RejectsTrajectoryOnOtherNodes) {
  const GridSpec g(16, 16.0);
  const auto p = subcritical();
  PicardConfig cfg = PicardConfig::defaults(p);
  cfg.time_nodes = 33;
  const SpectralField zero(g);
  StateTrajectory lin = linear_state(zero, zero, cfg, p);
  cfg.time_nodes = 34;
  EXPECT_THROW(duhamel_step(lin, zero, zero, cfg, p), ShapeMismatch);
}

TEST(Picard, ZeroDataConvergesImmediately) {
  const auto p = subcritical();
  const auto tr = solve_gaussian(0.0, p, PicardConfig::defaults(p));
  EXPECT_TRUE(tr.converged);
  EXPECT_EQ(tr.iteration_report.size(), 1u);
  for (const auto& f : tr.psi_hat) EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(Picard, SmallDataContractsGeometrically) {
  const auto p = subcritical();
  const PicardConfig cfg = PicardConfig::defaults(p);
  for (double amp : {1e-3, 2e-3}) {
    const auto tr = solve_gaussian(amp, p, cfg);
    ASSERT_TRUE(tr.converged);
    const auto& d = tr.iteration_report;
    EXPECT_LE(d.size(), 10u);
    for (std::size_t i = 1; i < d.size(); ++i) EXPECT_LT(d[i] / d[i - 1], 0.5) << "amplitude " << amp;
  }
}

TEST(Picard, ConvergedTrajectorySatisfiesTheSystem) {
  for (double sigma : {0.0, 0.1}) {
    const auto p = subcritical(sigma);
    const auto tr = solve_gaussian(1e-3, p, PicardConfig::defaults(p));
    const auto res = pde_residual(tr, p);
    EXPECT_LE(res.max_relative, 1e-6) << "sigma " << sigma;
    const GridSpec g(32, 32.0);
    const SpectralField psi0 = forward_transform(gaussian(g, 1e-3, 4.0));
    const SpectralField phiT = forward_transform(gaussian(g, 0.5e-3, 4.0));
    EXPECT_LE((tr.psi_hat.front() - psi0).max_abs(), 1e-10 * psi0.max_abs());
    EXPECT_LE((tr.phi_hat.back() - phiT).max_abs(), 1e-10 * phiT.max_abs());
    for (const auto& f : tr.psi_hat) EXPECT_LE(std::abs(f[0] - psi0[0]), 1e-12 * std::abs(psi0[0]));
  }
  // the linear trajectory is not a solution of the nonlinear system
  const auto p = subcritical();
  const GridSpec g(32, 32.0);
  const auto lin = linear_state(forward_transform(gaussian(g, 1e-2, 4.0)), SpectralField(g), PicardConfig::defaults(p), p);
  EXPECT_GT(pde_residual(lin, p).max_relative, 1e-4);
}

TEST(Picard, PaperBoundaryModeDriftsQuadratically) {
  const auto p = subcritical();
  PicardConfig cfg = PicardConfig::defaults(p);
  cfg.boundary_mode = BoundaryMode::Paper;
  const GridSpec g(32, 32.0);
  auto drift = [&](double amp) {
    const SpectralField psi0 = forward_transform(gaussian(g, amp, 4.0));
    const auto tr = picard_solve(psi0, SpectralField(g), cfg, p);
    return (tr.psi_hat.front() - psi0).max_abs();
  };
  const double d1 = drift(1e-3), d2 = drift(2e-3);
  EXPECT_GT(d1, 0.0);
  EXPECT_NEAR(d2 / d1, 4.0, 0.2);
}

TEST(Picard, LargeDataRaisesNoContraction) {
  const auto p = subcritical();
  EXPECT_THROW(solve_gaussian(0.7, p, PicardConfig::defaults(p), 32, 64.0, 8.0), NoContraction);
  PicardConfig capped = PicardConfig::defaults(p);
  capped.max_iter = 2;
  EXPECT_THROW(solve_gaussian(1e-3, p, capped), NoContraction);
}

TEST(Picard, QuadratureDiagnostic) {
  const auto p = subcritical();
  PicardConfig cfg = PicardConfig::defaults(p);
  cfg.diagnose_quadrature = true;
  EXPECT_NO_THROW(solve_gaussian(1e-3, p, cfg));
  cfg.time_nodes = 16;
  cfg.quadrature_tol = 1e-12;
  EXPECT_THROW(solve_gaussian(0.2, p, cfg), QuadratureUnderResolved);
}

TEST(PicardConfig, Validation) {
  const auto p = subcritical();
  PicardConfig cfg = PicardConfig::defaults(p);
  EXPECT_EQ(cfg.time_nodes, 160);
  EXPECT_NEAR(cfg.norm_c, 0.5 * std::sqrt(0.125), 1e-15);
  cfg.time_nodes = 15;
  EXPECT_THROW(cfg.validate(), InvalidParams);
  cfg = PicardConfig::defaults(p);
  cfg.norm_order = 2.0;
  EXPECT_THROW(cfg.validate(), InvalidParams);
  cfg = PicardConfig::defaults(p);
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidParams);
  EXPECT_EQ(PicardConfig::defaults(p.with_horizon(1.0)).time_nodes, 128);
}
