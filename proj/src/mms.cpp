#include "satnls/mms.hpp"

#include "satnls/metrics.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>

namespace satnls {

void MmsCase::validate() const {
  if (name != "gauss-sine" && name != "sine-mode")
    throw std::invalid_argument("mms case '" + name + "' is not in the catalog");
  for (double v : {amp, sigma, omega, beta, nu})
    if (!std::isfinite(v)) throw std::invalid_argument("mms parameters must be finite");
  if (!(sigma > 0.0)) throw std::invalid_argument("mms.sigma must be > 0");
  if (mx < 1 || my < 1) throw std::invalid_argument("mms.mx and mms.my must be >= 1");
}

MmsCase mms_catalog(const std::string& name) {
  MmsCase c;
  c.name = name;
  if (name == "sine-mode") {
    c.beta = 0.0;
    c.nu = 0.0;
  }
  c.validate();
  return c;
}

std::vector<std::string> mms_catalog_names() { return {"gauss-sine", "sine-mode"}; }

Complex mms_exact(const MmsCase& c, const Box& box, double x, double y, double t) {
  const auto [re, im] = mms_value(c, box, x, y, t);
  return {re, im};
}

namespace {

// Value, first and second derivative of one spatial factor in the unit variable.
struct Profile {
  double v, d1, d2;
};

Profile gauss_sine(double s, double sigma) {
  const double pi = std::numbers::pi;
  const double sn = std::sin(pi * s), cs = std::cos(pi * s);
  const double q = s - 0.5, s2 = sigma * sigma;
  const double g = std::exp(-q * q / s2);
  const double g1 = -2.0 * q / s2 * g;
  const double g2 = (4.0 * q * q / (s2 * s2) - 2.0 / s2) * g;
  return {sn * g, pi * cs * g + sn * g1, -pi * pi * sn * g + 2.0 * pi * cs * g1 + sn * g2};
}

Profile sine_mode(double s, int m) {
  const double k = m * std::numbers::pi;
  return {std::sin(k * s), k * std::cos(k * s), -k * k * std::sin(k * s)};
}

}  // namespace

Complex mms_source_value(const MmsCase& c, const Box& box, const PhysicsParams& params, double x, double y,
                         double t) {
  const double Lx = box.b - box.a, Ly = box.d - box.c;
  const double xi = (x - box.a) / Lx, eta = (y - box.c) / Ly;
  Profile X, Y;
  Complex T, Tt;
  const Complex carrier = std::polar(1.0, -c.omega * t);
  if (c.name == "sine-mode") {
    X = sine_mode(xi, c.mx);
    Y = sine_mode(eta, c.my);
    T = carrier;
    Tt = Complex(0.0, -c.omega) * carrier;
  } else {
    X = gauss_sine(xi, c.sigma);
    Y = gauss_sine(eta, c.sigma);
    const double env = 1.0 + c.beta * std::sin(c.nu * t);
    T = carrier * env;
    Tt = carrier * (Complex(0.0, -c.omega) * env + c.beta * c.nu * std::cos(c.nu * t));
  }
  const Complex u = c.amp * X.v * Y.v * T;
  const Complex ut = c.amp * X.v * Y.v * Tt;
  const Complex lap = c.amp * (X.d2 * Y.v / (Lx * Lx) + X.v * Y.d2 / (Ly * Ly)) * T;
  const double rho = std::norm(u);
  return Complex(0.0, 1.0) * ut + lap + params.lambda * u * kernel::f_sat(rho) +
         Complex(0.0, params.epsilon) * u * rho;
}

ComplexField mms_solution(const MmsCase& c, const Grid2D& grid, double t) {
  return ComplexField::sample(grid, [&](double x, double y) { return mms_exact(c, grid.box(), x, y, t); });
}

SourceFn mms_source(const MmsCase& c, const Grid2D& grid, const PhysicsParams& params) {
  c.validate();
  params.validate();
  return [c, grid, params](double t) {
    return ComplexField::sample(grid,
                                [&](double x, double y) { return mms_source_value(c, grid.box(), params, x, y, t); });
  };
}

MmsStudy run_mms_study(const MmsCase& c, const Box& box, const PhysicsParams& params,
                       const std::vector<double>& hs, double tau_ratio, double T) {
  c.validate();
  params.validate();
  if (hs.empty()) throw std::invalid_argument("run_mms_study: no mesh sizes");
  if (!(tau_ratio > 0.0)) throw std::invalid_argument("run_mms_study: tau_ratio must be > 0");
  MmsStudy study;
  study.mms = c;
  for (double h : hs) {
    const auto start = std::chrono::steady_clock::now();
    const Grid2D g = build_grid_from_steps(box, h, T, tau_ratio * h);
    MmsLevel level;
    level.h = h;
    level.tau = g.tau;
    const StepObserver track = [&](int, double t, const ComplexField& U) {
      const ComplexField e(g, mms_solution(c, g, t).values - U.values);
      level.err_2h = std::max(level.err_2h, norm_2h(e));
      level.err_1h = std::max(level.err_1h, seminorm_1h(e));
    };
    const ComplexField u0 = mms_solution(c, g, 0.0);
    CnfdRunConfig cfg;
    cfg.grid = g;
    cfg.params = params;
    cfg.source = mms_source(c, g, params);
    run_cnfd(u0, cfg, track);
    level.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    study.levels.push_back(level);
  }
  for (std::size_t i = 1; i < study.levels.size(); ++i) {
    const MmsLevel& a = study.levels[i - 1];
    const MmsLevel& b = study.levels[i];
    const double ratio = std::log2(a.h / b.h);
    study.rate_2h.push_back(observed_rate(a.err_2h, b.err_2h) / ratio);
    study.rate_1h.push_back(observed_rate(a.err_1h, b.err_1h) / ratio);
  }
  return study;
}

}  // namespace satnls
