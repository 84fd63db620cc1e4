#include "oracles.hpp"

#include "satnls/saturable.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace satnls;

TEST(Saturable, QuotientMatchesQuadrature) {
  EXPECT_LE(oracle::quotient_vs_quadrature(500, 42), 1e-12);
}

TEST(Saturable, PointwiseValues) {
  EXPECT_EQ(f_sat(0.0), 0.0);
  EXPECT_DOUBLE_EQ(f_sat(1.0), 0.5);
  EXPECT_DOUBLE_EQ(F_potential(std::exp(1.0) - 1.0), std::exp(1.0) - 2.0);
  EXPECT_EQ(F_potential(0.0), 0.0);
  EXPECT_DOUBLE_EQ(diff_quotient_F(1.0, 1.0), 0.5);
  EXPECT_NEAR(diff_quotient_F(1.0, 0.0), 1.0 - std::log(2.0), 1e-16);
  // F(rho) ~ rho^2/2 for small rho without cancellation.
  EXPECT_NEAR(F_potential(1e-9) / 5e-19, 1.0, 1e-6);
}

TEST(Saturable, QuotientIsSymmetricAndContinuousAcrossSwitch) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_NEAR(diff_quotient_F(a, b), diff_quotient_F(b, a), 1e-14);
  }
  // Either side of the switch agrees with f(m) + f''(m) g^2 / 24, m the midpoint, g the gap.
  for (double a : {0.0, 1e-3, 0.7, 3.0, 400.0}) {
    const double scale = std::max(1.0, a);
    for (double side : {0.99, 1.01}) {
      const double b = a + side * kQuotientSwitch * scale;
      const double g = b - a, m = 0.5 * (a + b);
      const double taylor = f_sat(m) - 2.0 / std::pow(1.0 + m, 3) * g * g / 24.0;
      EXPECT_NEAR(diff_quotient_F(b, a), taylor, 1e-13) << "a = " << a << ", side " << side;
    }
    EXPECT_EQ(diff_quotient_F(a, a), f_sat(a));
  }
}

TEST(Saturable, QuotientLiesBetweenEndpointSlopes) {
  // f is increasing, so f(min) <= (F(a)-F(b))/(a-b) <= f(max).
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    const double q = diff_quotient_F(a, b);
    EXPECT_GE(q, f_sat(std::min(a, b)) - 1e-15);
    EXPECT_LE(q, f_sat(std::max(a, b)) + 1e-15);
  }
}

TEST(Saturable, PsiAndPhiAverages) {
  const Complex z(0.3, -1.2), w(-0.4, 0.8);
  const double a = std::norm(z), b = std::norm(w);
  const Complex expect_psi = (F_potential(a) - F_potential(b)) / (a - b) * 0.5 * (z + w);
  EXPECT_NEAR(std::abs(psi(z, w) - expect_psi), 0.0, 1e-14);
  const Complex m = 0.5 * (z + w);
  EXPECT_NEAR(std::abs(phi(z, w) - std::norm(m) * m), 0.0, 1e-15);
  // 2 Re[psi(z, w) conj(z - w)] = F(|z|^2) - F(|w|^2)
  EXPECT_NEAR(2.0 * (psi(z, w) * std::conj(z - w)).real(), F_potential(a) - F_potential(b), 1e-14);
}

TEST(Saturable, RejectsInvalidInput) {
  EXPECT_THROW(f_sat(-1e-3), std::domain_error);
  EXPECT_THROW(F_potential(-1.0), std::domain_error);
  EXPECT_THROW(diff_quotient_F(-1.0, 1.0), std::domain_error);
  EXPECT_THROW(diff_quotient_F(1.0, std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  EXPECT_THROW((PhysicsParams{1.0, -0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((PhysicsParams{std::nan(""), 0.0}.validate()), std::invalid_argument);
}

TEST(Saturable, EnergyOfPlaneMode) {
  const Grid2D g = build_grid({0, 1, 0, 1}, 8, 8, 1.0, 2);
  const double pi = std::acos(-1.0);
  const ComplexField u = to_complex(RealField::sample(
      g, [&](double x, double y) { return 0.5 * std::sin(pi * x) * std::sin(pi * y); }));
  EXPECT_DOUBLE_EQ(energy_calEh(u), seminorm_1h_squared(u));
  double pot = 0;
  for (int j = 0; j < g.J; ++j)
    for (int k = 0; k < g.K; ++k) pot += F_potential(std::norm(u(j, k)));
  pot *= g.cell_area();
  EXPECT_NEAR(energy_Eh(u, {2.0, 0.0}), seminorm_1h_squared(u) - 2.0 * pot, 1e-14);
}
