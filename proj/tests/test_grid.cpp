#include "oracles.hpp"

#include "satnls/fld_io.hpp"
#include "satnls/grid.hpp"
#include "satnls/saturable.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

using namespace satnls;

TEST(Grid, StepsMustDivideTheBox) {
  const Grid2D g = build_grid_from_steps({-40, 40, -40, 40}, 0.25, 5.0, 1.0 / 32);
  EXPECT_EQ(g.J, 320);
  EXPECT_EQ(g.K, 320);
  EXPECT_EQ(g.N, 160);
  EXPECT_DOUBLE_EQ(g.x(g.J), 40.0);
  EXPECT_THROW(build_grid_from_steps({0, 1, 0, 1}, 0.3, 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(build_grid_from_steps({0, 1, 0, 1}, 0.25, 1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(build_grid_from_steps({1, 0, 0, 1}, 0.25, 1.0, 0.25), std::invalid_argument);
  EXPECT_THROW(build_grid({0, 1, 0, 1}, 1, 4, 1.0, 4), std::invalid_argument);
  EXPECT_THROW(build_grid({0, 1, 0, 1}, 4, 4, -1.0, 4), std::invalid_argument);
}

TEST(Grid, FieldShapeIsChecked) {
  const Grid2D g = build_grid({0, 1, 0, 1}, 4, 6, 1.0, 2);
  EXPECT_THROW(ComplexField(g, FieldArray<Complex>::Zero(4, 7)), std::invalid_argument);
  const Grid2D other = build_grid({0, 2, 0, 1}, 4, 6, 1.0, 2);
  EXPECT_THROW(inner_h(ComplexField(g), ComplexField(other)), std::invalid_argument);
}

TEST(Grid, LaplacianIsExactOnQuadratics) {
  const Grid2D g = build_grid({-1, 2, 0, 1.5}, 12, 9, 1.0, 2);
  // Lap(3x^2 - xy + 2y^2 + x) = 6 + 4
  const RealField u = RealField::sample_all(g, [](double x, double y) { return 3 * x * x - x * y + 2 * y * y + x; });
  const RealField lap = laplacian_5pt(u);
  for (int j = 1; j < g.J; ++j)
    for (int k = 1; k < g.K; ++k) EXPECT_NEAR(lap(j, k), 10.0, 1e-10);
  EXPECT_TRUE(lap.boundary_is_zero());
}

TEST(Grid, DifferenceQuotientsOnLinearFunction) {
  const Grid2D g = build_grid({0, 1, 0, 2}, 5, 8, 1.0, 2);
  const RealField u = RealField::sample_all(g, [](double x, double y) { return 2 * x - 3 * y; });
  const auto [fx, fy] = forward_diff(u);
  const auto [bx, by] = backward_diff(u);
  const auto [cx, cy] = centered_diff(u);
  EXPECT_NEAR(fx(0, 3), 2.0, 1e-12);
  EXPECT_EQ(fx(g.J, 3), 0.0);
  EXPECT_NEAR(fy(2, 0), -3.0, 1e-12);
  EXPECT_EQ(fy(2, g.K), 0.0);
  EXPECT_NEAR(bx(g.J, 1), 2.0, 1e-12);
  EXPECT_EQ(bx(0, 1), 0.0);
  EXPECT_NEAR(by(1, g.K), -3.0, 1e-12);
  EXPECT_NEAR(cx(2, 2), 2.0, 1e-12);
  EXPECT_NEAR(cy(2, 2), -3.0, 1e-12);
}

TEST(Grid, SummationByParts) {
  EXPECT_LE(oracle::summation_by_parts_defect(40, 20261016), 1e-12);
}

TEST(Grid, NormsAgreeWithBruteForce) {
  std::mt19937_64 rng(7);
  const Grid2D g = build_grid({-2, 2, -1, 3}, 10, 14, 1.0, 2);
  const ComplexField u = oracle::random_dirichlet(g, rng);
  double l1 = 0, l2 = 0, l3 = 0, l4 = 0;
  for (int j = 0; j < g.J; ++j)
    for (int k = 0; k < g.K; ++k) {
      const double m = std::abs(u(j, k));
      l1 += m;
      l2 += m * m;
      l3 += m * m * m;
      l4 += m * m * m * m;
    }
  const double A = g.cell_area();
  EXPECT_NEAR(norm_ph(u, 1.0), A * l1, 1e-12 * A * l1);
  EXPECT_NEAR(norm_2h_squared(u), A * l2, 1e-12 * A * l2);
  EXPECT_NEAR(norm_ph(u, 3.0), std::cbrt(A * l3), 1e-12);
  EXPECT_NEAR(norm_ph(u, 4.0), std::pow(A * l4, 0.25), 1e-12);
  EXPECT_NEAR(norm_2h_interior(u), norm_2h(u), 1e-13);
  EXPECT_THROW(norm_ph(u, 0.5), std::invalid_argument);
}

TEST(Grid, DiscretePoincareBound) {
  // |u|^2_{1,h} >= (4/dx^2 sin^2(pi/2J) + 4/dy^2 sin^2(pi/2K)) ||u||^2_{2,h} on X_JK.
  std::mt19937_64 rng(11);
  const Grid2D g = build_grid({0, 3, 0, 2}, 15, 8, 1.0, 2);
  const double pi = std::acos(-1.0);
  const double lam1 = 4 / (g.dx * g.dx) * std::pow(std::sin(pi / (2 * g.J)), 2) +
                      4 / (g.dy * g.dy) * std::pow(std::sin(pi / (2 * g.K)), 2);
  for (int t = 0; t < 20; ++t) {
    const ComplexField u = oracle::random_dirichlet(g, rng);
    EXPECT_GE(seminorm_1h_squared(u), lam1 * norm_2h_squared(u) * (1 - 1e-12));
  }
  // The lowest discrete mode attains it.
  const RealField mode = RealField::sample(
      g, [&](double x, double y) { return std::sin(pi * x / 3) * std::sin(pi * y / 2); });
  EXPECT_NEAR(seminorm_1h_squared(mode), lam1 * norm_2h_squared(mode), 1e-10);
}

TEST(Grid, PairwiseSumIsOrderStable) {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 0.1 * static_cast<double>(i % 17) + 1e-3;
  const double s = pairwise_sum(std::span<const double>(xs));
  long double ref = 0;
  for (double x : xs) ref += x;
  EXPECT_NEAR(s, static_cast<double>(ref), 1e-11);
  EXPECT_EQ(pairwise_sum(std::span<const double>()), 0.0);
}

TEST(Fld, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  const Grid2D g = build_grid({-1.5, 2.25, -0.5, 0.75}, 7, 5, 1.0, 2);
  ComplexField u = ComplexField::sample_all(g, [&](double, double) {
    return Complex(std::uniform_real_distribution<double>(-1, 1)(rng), 1e-300);
  });
  std::stringstream ss;
  write_fld(ss, u, 1.0 / 3.0);
  const Snapshot back = read_fld(ss);
  EXPECT_EQ(back.time, 1.0 / 3.0);
  EXPECT_TRUE(back.field.grid.same_nodes(g));
  EXPECT_TRUE((back.field.values == u.values).all());
}

TEST(Fld, RejectsDamagedInput) {
  std::stringstream bad("FLD2 2 2 0 1 0 1 0\n");
  EXPECT_THROW(read_fld(bad), std::runtime_error);
  const Grid2D g = build_grid({0, 1, 0, 1}, 2, 2, 1.0, 2);
  std::stringstream ss;
  write_fld(ss, ComplexField(g), 0.0);
  std::string s = ss.str();
  s.resize(s.size() - 5);
  std::stringstream cut(s);
  EXPECT_THROW(read_fld(cut), std::runtime_error);
}

TEST(Grid, LaplacianEigenfunction) {
  const Grid2D g = build_grid({-1, 1, 0.5, 2}, 8, 8, 1.0, 2);
  const double pi = std::acos(-1.0);
  const int p = 2, q = 3;
  const double Lx = g.b - g.a, Ly = g.d - g.c;
  const RealField u = RealField::sample_all(g, [&](double x, double y) {
    return std::sin(p * pi * (x - g.a) / Lx) * std::sin(q * pi * (y - g.c) / Ly);
  });
  const double ev = -(4 / (g.dx * g.dx) * std::pow(std::sin(p * pi * g.dx / (2 * Lx)), 2) +
                      4 / (g.dy * g.dy) * std::pow(std::sin(q * pi * g.dy / (2 * Ly)), 2));
  const RealField lap = laplacian_5pt(u);
  for (int j = 1; j < g.J; ++j)
    for (int k = 1; k < g.K; ++k) EXPECT_NEAR(lap(j, k), ev * u(j, k), 1e-12);
  EXPECT_EQ(norm_inf(laplacian_5pt(RealField(g))), 0.0);
}

TEST(Grid, SpikeStencils) {
  const Grid2D g = build_grid({0, 1, 0, 1}, 4, 4, 1.0, 2);
  RealField u(g);
  u(2, 1) = 1.0;
  const auto [ux, uy] = forward_diff(u);
  EXPECT_DOUBLE_EQ(ux(1, 1), 1.0 / g.dx);
  EXPECT_DOUBLE_EQ(ux(2, 1), -1.0 / g.dx);
  EXPECT_EQ(ux(3, 1), 0.0);
  EXPECT_DOUBLE_EQ(uy(2, 0), 1.0 / g.dy);
  EXPECT_DOUBLE_EQ(uy(2, 1), -1.0 / g.dy);

  // Interior ones on the unit square with J = K = 4: 9 nodes in the sum.
  const RealField ones = RealField::sample(g, [](double, double) { return 1.0; });
  EXPECT_DOUBLE_EQ(norm_2h_squared(ones), 9.0 / 16.0);
  EXPECT_EQ(norm_2h(RealField(g)), 0.0);

  // Single spike on the J = K = 2 unit grid: |u|^2_{1,h} = dx dy (2/dx^2 + 2/dy^2) = 4.
  const Grid2D g2 = build_grid({0, 1, 0, 1}, 2, 2, 1.0, 2);
  RealField s(g2);
  s(1, 1) = 1.0;
  EXPECT_DOUBLE_EQ(seminorm_1h_squared(s), 4.0);
}

TEST(Grid, EnergyMatchesDirectSummation) {
  std::mt19937_64 rng(19);
  const Grid2D g = build_grid({0, 1.25, 0, 1.25}, 5, 5, 1.0, 2);
  const ComplexField u = oracle::random_dirichlet(g, rng, 0.8);
  const PhysicsParams p{1.4, 0.0};
  long double grad = 0, pot = 0;
  for (int j = 0; j < g.J; ++j)
    for (int k = 0; k < g.K; ++k) {
      grad += std::norm((u(j + 1, k) - u(j, k)) / g.dx) + std::norm((u(j, k + 1) - u(j, k)) / g.dy);
      const long double rho = std::norm(u(j, k));
      pot += rho - std::log1p(rho);
    }
  const double expect = static_cast<double>(g.cell_area() * (grad - p.lambda * pot));
  EXPECT_NEAR(energy_Eh(u, p), expect, 1e-13 * std::max(1.0, std::abs(expect)));
  EXPECT_EQ(energy_Eh(ComplexField(g), p), 0.0);
  EXPECT_EQ(energy_Eh(u, {0.0, 0.0}), seminorm_1h_squared(u));
}
