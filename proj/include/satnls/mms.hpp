#pragma once

#include "satnls/cnfd.hpp"
#include "satnls/grid.hpp"
#include "satnls/saturable.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace satnls {

/// Closed-form manufactured solution u(x, y, t) = amp X(xi) Y(eta) T(t) on a
/// box, xi and eta the unit-scaled coordinates. Both spatial factors vanish
/// on the boundary.
///
///   gauss-sine: X(s) = sin(pi s) exp(-(s - 1/2)^2 / sigma^2),
///               T(t) = exp(-i omega t) (1 + beta sin(nu t))
///   sine-mode:  X(s) = sin(mx pi s), Y(s) = sin(my pi s), T(t) = exp(-i omega t)
struct MmsCase {
  std::string name = "gauss-sine";
  double amp = 1.0;
  double sigma = 0.3;
  double omega = 2.0;
  double beta = 0.5;
  double nu = 3.0;
  int mx = 1, my = 1;

  void validate() const;
};

/// Catalog lookup; throws for names outside {gauss-sine, sine-mode}.
MmsCase mms_catalog(const std::string& name);
std::vector<std::string> mms_catalog_names();

/// (Re u, Im u) at a point. Written against a generic scalar so that tests can
/// push dual numbers through it.
template <typename T>
std::pair<T, T> mms_value(const MmsCase& c, const Box& box, const T& x, const T& y, const T& t) {
  using std::cos;
  using std::exp;
  using std::sin;
  const double pi = std::numbers::pi;
  const T xi = (x - box.a) / (box.b - box.a);
  const T eta = (y - box.c) / (box.d - box.c);
  T space, envelope;
  if (c.name == "sine-mode") {
    space = c.amp * sin(c.mx * pi * xi) * sin(c.my * pi * eta);
    envelope = T(1.0) + 0.0 * t;
  } else {
    const double s2 = c.sigma * c.sigma;
    space = c.amp * sin(pi * xi) * exp(-(xi - 0.5) * (xi - 0.5) / s2) * sin(pi * eta) *
            exp(-(eta - 0.5) * (eta - 0.5) / s2);
    envelope = 1.0 + c.beta * sin(c.nu * t);
  }
  const T s = space * envelope;
  return {s * cos(c.omega * t), -(s * sin(c.omega * t))};
}

Complex mms_exact(const MmsCase& c, const Box& box, double x, double y, double t);

/// r = i u_t + Lap u + lambda u rho/(1+rho) + i eps u rho, rho = |u|^2,
/// from hand-derived derivatives.
Complex mms_source_value(const MmsCase& c, const Box& box, const PhysicsParams& params, double x, double y,
                         double t);

/// Exact solution sampled on the grid, boundary zero.
ComplexField mms_solution(const MmsCase& c, const Grid2D& grid, double t);

/// Source injector for the steppers; boundary nodes are zero.
SourceFn mms_source(const MmsCase& c, const Grid2D& grid, const PhysicsParams& params);

struct MmsLevel {
  double h = 0.0;
  double tau = 0.0;
  double err_2h = 0.0;  // max over n of ||u^n - U^n||_{2,h}
  double err_1h = 0.0;  // max over n of |u^n - U^n|_{1,h}
  double wall_s = 0.0;
};

struct MmsStudy {
  MmsCase mms;
  std::vector<MmsLevel> levels;
  std::vector<double> rate_2h;  // between consecutive levels
  std::vector<double> rate_1h;
};

/// Runs the manufactured problem through CNFD on each h with tau = tau_ratio * h
/// up to T. The catalog profiles are not smooth under periodic extension, so
/// the spectral stepper is not offered here.
MmsStudy run_mms_study(const MmsCase& c, const Box& box, const PhysicsParams& params,
                       const std::vector<double>& hs, double tau_ratio, double T);

}  // namespace satnls
