#include "oracles.hpp"

#include "satnls/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace satnls;

TEST(Spectral, NonlinearFlowMatchesOde) {
  EXPECT_LE(oracle::nonlinear_flow_vs_ode(300, 77), 1e-10);
}

TEST(Spectral, NonlinearSubstepIsPointwiseFlow) {
  std::mt19937_64 rng(4);
  const Grid2D g = build_grid({0, 1, 0, 1}, 6, 6, 1.0, 2);
  const ComplexField u = oracle::random_dirichlet(g, rng);
  const PhysicsParams p{1.3, 0.02};
  const ComplexField v = nonlinear_substep(u, 0.1, p);
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k) EXPECT_EQ(v(j, k), nonlinear_flow(u(j, k), 0.1, p));
  // Composition of two half steps equals one full step.
  const ComplexField w = nonlinear_substep(nonlinear_substep(u, 0.05, p), 0.05, p);
  EXPECT_LE(norm_inf(ComplexField(g, w.values - v.values)), 1e-14);
}

TEST(Spectral, LinearStepIsExactForPlaneWaves) {
  const double L = 2 * std::numbers::pi;
  const Grid2D g = build_grid({0, L, 0, 2 * L}, 16, 24, 1.0, 2);
  SpectralWorkspace ws(g);
  const int p = 3, q = -2;
  const double kx = p, ky = q * 0.5, dt = 0.37;
  PeriodicField cell(g.J, g.K), expect(g.J, g.K);
  for (int j = 0; j < g.J; ++j)
    for (int k = 0; k < g.K; ++k) {
      const double ph = kx * g.x(j) + ky * g.y(k);
      cell(j, k) = std::polar(1.0, ph);
      // i u_t + Lap u = 0  =>  u = exp(i(k.x - |k|^2 t))
      expect(j, k) = std::polar(1.0, ph - (kx * kx + ky * ky) * dt);
    }
  linear_substep(cell, dt, ws);
  EXPECT_LE((cell - expect).abs().maxCoeff(), 1e-12);
}

TEST(Spectral, LaplacianAndWavenumbers) {
  const Grid2D g = build_grid({-1, 1, -2, 2}, 8, 10, 1.0, 2);
  SpectralWorkspace ws(g);
  EXPECT_EQ(ws.rows(), 8);
  EXPECT_EQ(ws.cols(), 10);
  EXPECT_DOUBLE_EQ(ws.kx()(1), std::numbers::pi);
  EXPECT_DOUBLE_EQ(ws.kx()(7), -std::numbers::pi);
  EXPECT_DOUBLE_EQ(ws.ky()(5), -5 * std::numbers::pi / 2);
  PeriodicField c(g.J, g.K);
  for (int j = 0; j < g.J; ++j)
    for (int k = 0; k < g.K; ++k) c(j, k) = std::cos(std::numbers::pi * g.x(j)) * std::sin(std::numbers::pi * g.y(k));
  const PeriodicField lap = ws.laplacian(c);
  const double k2 = 2 * std::numbers::pi * std::numbers::pi;
  EXPECT_LE((lap + k2 * c).abs().maxCoeff(), 1e-12);
  PeriodicField rt = c;
  ws.forward(rt);
  ws.inverse(rt);
  EXPECT_LE((rt - c).abs().maxCoeff(), 1e-14);
}

TEST(Spectral, StrangConservesMassWithoutLoss) {
  const Grid2D g = build_grid({-8, 8, -8, 8}, 64, 64, 0.5, 25);
  SsfmRunConfig cfg{g, {1.0, 0.0}, {0.0, 0.5}, {}};
  const ComplexField u0 = ComplexField::sample(g, [](double x, double y) {
    return 1.2 * std::exp(-(x * x + y * y) / 3.0) * std::polar(1.0, 0.5 * x);
  });
  const SsfmTrajectory tr = run_ssfm(u0, cfg);
  ASSERT_EQ(tr.snapshots.size(), 2u);
  for (const auto& d : tr.diagnostics) EXPECT_NEAR(d.mass, tr.diagnostics[0].mass, 1e-12 * tr.diagnostics[0].mass);
  EXPECT_LT(tr.max_boundary_tail, 1e-4);
}

TEST(Spectral, StrangIsSecondOrderInTime) {
  // Self-convergence on a smooth periodic state; halving dt should quarter the error.
  const double L = 2 * std::numbers::pi;
  const Grid2D g = build_grid({0, L, 0, L}, 32, 32, 1.0, 2);
  SpectralWorkspace ws(g);
  const PhysicsParams p{1.0, 0.05};
  auto initial = [&]() {
    PeriodicField c(g.J, g.K);
    for (int j = 0; j < g.J; ++j)
      for (int k = 0; k < g.K; ++k)
        c(j, k) = Complex(1.0 + 0.5 * std::cos(g.x(j)), 0.3 * std::sin(g.y(k) + g.x(j)));
    return c;
  };
  auto run = [&](int steps) {
    PeriodicField c = initial();
    for (int n = 0; n < steps; ++n) strang_step(c, 0.5 / steps, p, ws);
    return c;
  };
  const PeriodicField ref = run(512);
  const double e1 = (run(16) - ref).abs().maxCoeff();
  const double e2 = (run(32) - ref).abs().maxCoeff();
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
}

TEST(Spectral, ForcedStepTracksSmoothPeriodicSolution) {
  // u = a(t) exp(i x) on [0, 2pi]^2 with r chosen so that u solves the forced equation.
  const double L = 2 * std::numbers::pi;
  const Grid2D g = build_grid({0, L, 0, L}, 16, 16, 1.0, 2);
  const PhysicsParams p{1.0, 0.1};
  auto amp = [](double t) { return Complex(1.0 + 0.3 * std::sin(t), 0.2 * t); };
  auto damp = [](double t) { return Complex(0.3 * std::cos(t), 0.2); };
  auto forcing_at = [&](double t) {
    const Complex a = amp(t);
    const double rho = std::norm(a);
    // i a' - a + lambda a f(rho) + i eps a rho
    const Complex coef = Complex(0, 1) * damp(t) - a + p.lambda * a * rho / (1 + rho) + Complex(0, p.epsilon) * a * rho;
    PeriodicField r(g.J, g.K);
    for (int j = 0; j < g.J; ++j)
      for (int k = 0; k < g.K; ++k) r(j, k) = coef * std::polar(1.0, g.x(j));
    return r;
  };
  auto err = [&](int steps) {
    SpectralWorkspace ws(g);
    const double dt = 1.0 / steps;
    PeriodicField c(g.J, g.K);
    for (int j = 0; j < g.J; ++j)
      for (int k = 0; k < g.K; ++k) c(j, k) = amp(0) * std::polar(1.0, g.x(j));
    for (int n = 0; n < steps; ++n) {
      const PeriodicField r = forcing_at((n + 0.5) * dt);
      strang_step(c, dt, p, ws, &r);
    }
    double e = 0;
    for (int j = 0; j < g.J; ++j)
      for (int k = 0; k < g.K; ++k) e = std::max(e, std::abs(c(j, k) - amp(1.0) * std::polar(1.0, g.x(j))));
    return e;
  };
  const double e1 = err(40), e2 = err(80);
  EXPECT_LT(e1, 5e-3);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.15);
}

TEST(Spectral, PeriodicConversions) {
  const Grid2D g = build_grid({0, 1, 0, 1}, 4, 5, 1.0, 2);
  const ComplexField u = ComplexField::sample_all(g, [](double x, double y) { return Complex(1 + x, y); });
  const PeriodicField c = to_periodic(u);
  EXPECT_EQ(c.rows(), 4);
  EXPECT_EQ(c.cols(), 5);
  const ComplexField back = from_periodic(c, g);
  EXPECT_TRUE(back.boundary_is_zero());
  EXPECT_EQ(back(2, 3), u(2, 3));
  EXPECT_DOUBLE_EQ(boundary_tail(c), std::abs(u(3, 0)));
  EXPECT_THROW(from_periodic(PeriodicField(3, 5), g), std::invalid_argument);
}

TEST(Spectral, TrivialFlows) {
  EXPECT_EQ(nonlinear_flow(Complex(0, 0), 0.3, {1.0, 0.1}), Complex(0, 0));
  const Complex u = std::polar(1.0, 0.4);
  const Complex v = nonlinear_flow(u, 0.3, {1.5, 0.0});
  EXPECT_NEAR(std::abs(v), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(v - u * std::polar(1.0, 1.5 * 0.3 / 2)), 0.0, 1e-15);

  const Grid2D g = build_grid({-4, 4, -4, 4}, 32, 32, 1.0, 2);
  SpectralWorkspace ws(g);
  const ComplexField u0 = ComplexField::sample(g, [](double x, double y) { return std::exp(-x * x - y * y / 2); });
  const ComplexField a = strang_step(u0, 0.05, {0.0, 0.0}, ws);
  const ComplexField b = linear_substep(u0, 0.05, ws);
  EXPECT_LE(norm_inf(ComplexField(g, a.values - b.values)), 1e-14);
  EXPECT_EQ(norm_inf(linear_substep(ComplexField(g), 0.05, ws)), 0.0);
  const SsfmTrajectory tr = run_ssfm(u0, SsfmRunConfig{g, {1.0, 0.0}, {}, {}}, 0);
  EXPECT_EQ(tr.diagnostics.size(), 1u);
}

TEST(Spectral, RichardsonRatioOnSmoothPulse) {
  const Grid2D g = build_grid({-10, 10, -10, 10}, 64, 64, 1.0, 2);
  SpectralWorkspace ws(g);
  const PhysicsParams p{1.0, 0.01};
  const PeriodicField u0 = to_periodic(ComplexField::sample(g, [](double x, double y) {
    return 1.5 * std::exp(-(x * x + y * y) / 4) * std::polar(1.0, 0.3 * x);
  }));
  auto run = [&](int steps) {
    PeriodicField c = u0;
    for (int n = 0; n < steps; ++n) strang_step(c, 1.0 / steps, p, ws);
    return c;
  };
  const PeriodicField a = run(10), b = run(20), c = run(40);
  const double ratio = (a - b).abs().maxCoeff() / (b - c).abs().maxCoeff();
  EXPECT_NEAR(ratio, 4.0, 0.5);
}
