#include <gtest/gtest.h>

#include <random>

#include "hughes/parallel.hpp"
#include "hughes/spectral_ops.hpp"
#include "support.hpp"

using namespace hughes;
using hughes::testing::random_field;

TEST(ModelParams, SubcriticalFlagAndSaturation) {
  const auto p = validate_params(1.0, 0.25, 0.0, 10.0);
  EXPECT_TRUE(p.subcritical());
  EXPECT_DOUBLE_EQ(p.f(), 0.75);
  const auto q = validate_params(1.0, 0.75, 0.0, 10.0);
  EXPECT_FALSE(q.subcritical());
  EXPECT_DOUBLE_EQ(q.f(), 0.25);
}

TEST(ModelParams, RejectsOutOfRange) {
  EXPECT_THROW(validate_params(1.0, 1.5, 0.0, 10.0), InvalidParams);
  EXPECT_THROW(validate_params(1.0, 0.0, 0.0, 10.0), InvalidParams);
  EXPECT_THROW(validate_params(1.0, 0.25, -0.1, 10.0), InvalidParams);
  EXPECT_THROW(validate_params(1.0, 0.25, 0.0, 0.0), InvalidParams);
  EXPECT_THROW(validate_params(1.0, NAN, 0.0, 1.0), InvalidParams);
  EXPECT_THROW(validate_params(-1.0, 0.25, 0.0, 1.0), InvalidParams);
}

TEST(ModelParams, ErrorKindIsReported) {
  try {
    validate_params(1.0, 1.5, 0.0, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParams);
  }
}

TEST(Hamiltonian, ClosedFormValues) {
  const auto p = validate_params(1.0, 0.25, 0.0, 10.0);
  EXPECT_NEAR(hamiltonian(0.0, {1.0, 0.0}, 2.0, p), 0.0, 1e-15);
  EXPECT_NEAR(hamiltonian(0.25, {0.0, 0.0}, 0.0, p), -0.28125, 1e-15);
  EXPECT_NEAR(hamiltonian(0.25, {2.0, 0.0}, 2.0, p), 0.625, 1e-15);
  EXPECT_THROW(hamiltonian(1.0, {1.0, 0.0}, 2.0, p), InvalidParams);
  EXPECT_THROW(hamiltonian(0.5, {1.0, 0.0}, 2.5, p), InvalidParams);
}

TEST(Hamiltonian, MomentumDerivativeMatchesFiniteDifferences) {
  const auto p = validate_params(1.0, 0.25, 0.0, 10.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rho(0.0, 0.95), mom(-2.0, 2.0), beta(0.0, 2.0);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const double r = rho(rng), b = beta(rng);
    const Vec2 q{mom(rng), mom(rng)};
    const Vec2 g = hamiltonian_dp(r, q, b, p);
    for (int k = 0; k < 2; ++k) {
      Vec2 qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      const double fd = (hamiltonian(r, qp, b, p) - hamiltonian(r, qm, b, p)) / (2 * h);
      EXPECT_NEAR(fd, g[k], 1e-8);
    }
  }
}

TEST(Stationary, GradientIsInverseSaturation) {
  auto s = stationary_solution(validate_params(1.0, 0.25, 0.0, 10.0));
  EXPECT_DOUBLE_EQ(s.rho_bar, 0.25);
  EXPECT_NEAR(s.grad_phi_bar[0], 4.0 / 3.0, 1e-15);
  EXPECT_EQ(s.grad_phi_bar[1], 0.0);
  s = stationary_solution(validate_params(1.0, 0.5, 0.0, 10.0));
  EXPECT_DOUBLE_EQ(s.grad_phi_bar[0], 2.0);
  const auto viscous = stationary_solution(validate_params(1.0, 0.5, 0.7, 10.0));
  EXPECT_EQ(viscous.grad_phi_bar, s.grad_phi_bar);
}

TEST(Stationary, SpectralResidualVanishes) {
  for (double rho : {0.1, 0.25, 0.5, 0.75}) {
    for (double sigma : {0.0, 0.3}) {
      const auto p = validate_params(1.0, rho, sigma, 10.0);
      for (int n : {8, 32}) {
        const auto res = stationary_residual(p, GridSpec(n, 17.0));
        EXPECT_LE(res.density.max_abs(), 1e-15);
        EXPECT_LE(res.potential.max_abs(), 1e-15);
      }
    }
  }
}

TEST(Grid, FrequenciesAndPairs) {
  const GridSpec g(16, 2.0 * std::numbers::pi);
  EXPECT_EQ(g.frequency(0), 0.0);
  EXPECT_EQ(g.stored_xi(0), (Vec2{0.0, 0.0}));
  for (int k = 1; k < 8; ++k) EXPECT_DOUBLE_EQ(g.frequency(k), -g.frequency(-k));
  EXPECT_TRUE(g.is_nyquist(8));
  EXPECT_EQ(g.derivative_frequency(8), 0.0);
  EXPECT_THROW(GridSpec(7, 1.0), InvalidParams);
  EXPECT_THROW(GridSpec(6, 1.0), InvalidParams);
  EXPECT_THROW(GridSpec(8, 0.0), InvalidParams);
}

TEST(Transform, ConstantAndCosine) {
  const GridSpec g(16, 10.0);
  const auto c = forward_transform(RealField::sample(g, [](double, double) { return 1.0; }));
  EXPECT_NEAR(c[0].real(), 1.0, 1e-15);
  double rest = 0.0;
  for (std::size_t s = 1; s < c.size(); ++s) rest = std::max(rest, std::abs(c[s]));
  EXPECT_LT(rest, 1e-15);

  const auto cs = forward_transform(
      RealField::sample(g, [&](double x, double) { return std::cos(2.0 * std::numbers::pi * x / g.length()); }));
  EXPECT_NEAR(std::abs(cs.at(1, 0)), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(cs.at(-1, 0)), 0.5, 1e-15);
  EXPECT_NEAR(cs.full_sum_squares(), 0.5, 1e-15);
}

TEST(Transform, RoundTripParsevalHermitian) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8 << (trial % 3);
    const GridSpec g(n, 3.0 + trial);
    const RealField f = random_field(g, rng);
    const SpectralField s = forward_transform(f);
    EXPECT_LE(s.hermitian_defect(), 1e-15 * s.max_abs());
    const RealField back = inverse_transform(s);
    double err = 0.0;
    for (std::size_t i = 0; i < f.values().size(); ++i) err = std::max(err, std::abs(back.values()[i] - f.values()[i]));
    EXPECT_LE(err, 1e-12 * f.max_abs());
    EXPECT_NEAR(s.l2_norm(), f.l2_norm(), 1e-12 * f.l2_norm());
  }
}

TEST(Transform, ShapeMismatchDetected) {
  const GridSpec a(16, 1.0), b(32, 1.0);
  EXPECT_THROW(forward_transform(RealField(a), b), ShapeMismatch);
  EXPECT_THROW(inverse_transform(SpectralField(a), b), ShapeMismatch);
  EXPECT_THROW(SpectralField(a) + SpectralField(b), ShapeMismatch);
}

TEST(Transform, ConcurrentUseIsSafe) {
  const GridSpec g(64, 5.0);
  std::mt19937_64 rng(3);
  const RealField f = random_field(g, rng);
  const SpectralField ref = forward_transform(f);
  std::vector<double> errs(64, 0.0);
  parallel_for(errs.size(), [&](std::size_t i) {
    const GridSpec gi(32 + 2 * static_cast<int>(i % 4), 5.0);
    (void)forward_transform(RealField(gi));
    errs[i] = (forward_transform(f) - ref).max_abs();
  });
  for (double e : errs) EXPECT_EQ(e, 0.0);
}

TEST(SpectralOps, DerivativesOfTrigonometricFields) {
  const GridSpec g(32, 4.0);
  const double k = 2.0 * std::numbers::pi * 3 / g.length();
  const auto f = forward_transform(RealField::sample(g, [&](double x, double y) { return std::sin(k * x) * std::cos(k * y); }));
  const RealField dx = inverse_transform(ddx(f));
  const RealField lap = inverse_transform(laplacian(f));
  double e1 = 0.0, e2 = 0.0;
  for (int iy = 0; iy < g.n(); ++iy)
    for (int ix = 0; ix < g.n(); ++ix) {
      const double x = g.x(ix), y = g.y(iy);
      e1 = std::max(e1, std::abs(dx(ix, iy) - k * std::cos(k * x) * std::cos(k * y)));
      e2 = std::max(e2, std::abs(lap(ix, iy) + 2 * k * k * std::sin(k * x) * std::cos(k * y)));
    }
  EXPECT_LT(e1, 1e-12);
  EXPECT_LT(e2, 1e-11);
}

TEST(SpectralOps, DealiasedProductIsExactForResolvedProducts) {
  // Fields with |k| < n/3: the 3/2-padded product equals the exact product's
  // truncation, and with |k| < n/4 the product is itself resolved.
  const GridSpec g(32, 6.0);
  std::mt19937_64 rng(11);
  const SpectralField a = hughes::testing::random_band_limited(g, rng, 7);
  const SpectralField b = hughes::testing::random_band_limited(g, rng, 7);
  const SpectralField prod = dealiased_product(a, b);
  const RealField ra = inverse_transform(a), rb = inverse_transform(b);
  RealField direct(g);
  for (std::size_t i = 0; i < direct.values().size(); ++i) direct.values()[i] = ra.values()[i] * rb.values()[i];
  EXPECT_LT((forward_transform(direct) - prod).max_abs(), 1e-14 * prod.max_abs() * 10);

  // An aliasing pair: modes 10 and 10 on n = 32 produce 20 which wraps to -12 on
  // the plain grid; the dealiased product must drop it.
  SpectralField c(g);
  c.set_mode(10, 0, {0.5, 0.0});
  const SpectralField sq = dealiased_product(c, c);
  EXPECT_LT(std::abs(sq.at(12, 0)), 1e-16);
  EXPECT_NEAR(sq[0].real(), 0.5, 1e-15);
}
