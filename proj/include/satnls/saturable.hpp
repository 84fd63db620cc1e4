#pragma once

#include "satnls/grid.hpp"

#include <algorithm>
#include <cmath>

namespace satnls {

/// Coefficients of i u_t + Lap u + lambda u|u|^2/(1+|u|^2) + i eps u|u|^2 = 0.
struct PhysicsParams {
  double lambda = 1.0;
  double epsilon = 0.0;  // cubic loss, >= 0

  void validate() const;
};

/// Below this relative gap the difference quotient of F falls back to the
/// midpoint value f((a+b)/2).
inline constexpr double kQuotientSwitch = 1e-7;

namespace kernel {

// Unchecked pointwise kernels for inner loops. Callers guarantee s, rho >= 0.

inline double f_sat(double s) { return s / (1.0 + s); }

inline double F_potential(double rho) { return rho - std::log1p(rho); }

inline double diff_quotient_F(double a, double b) {
  const double gap = a - b;
  if (std::abs(gap) <= kQuotientSwitch * std::max({1.0, a, b})) return f_sat(0.5 * (a + b));
  // (F(a) - F(b)) / (a - b) with F(a) - F(b) = gap - log((1+a)/(1+b)).
  return 1.0 - std::log1p(gap / (1.0 + b)) / gap;
}

inline Complex psi(Complex z, Complex w) {
  return diff_quotient_F(std::norm(z), std::norm(w)) * 0.5 * (z + w);
}

inline Complex phi(Complex z, Complex w) {
  const Complex m = 0.5 * (z + w);
  return std::norm(m) * m;
}

}  // namespace kernel

/// f(s) = s/(1+s) for s >= 0.
double f_sat(double s);

/// F(rho) = rho - log(1+rho), the antiderivative of f with F(0) = 0.
double F_potential(double rho);

/// (F(a) - F(b))/(a - b), continuously extended by f at a = b. Equal to the
/// integral of f(b + t(a-b)) over t in [0,1].
double diff_quotient_F(double a, double b);

/// psi(z, w) = [(F(|z|^2) - F(|w|^2)) / (|z|^2 - |w|^2)] (z + w)/2.
Complex psi(Complex z, Complex w);

/// phi(z, w) = |(z+w)/2|^2 (z+w)/2.
Complex phi(Complex z, Complex w);

/// E_h(u) = |u|^2_{1,h} - lambda ||F(|u|^2)||_{1,h}.
double energy_Eh(const ComplexField& u, const PhysicsParams& params);

/// |u|^2_{1,h}.
double energy_calEh(const ComplexField& u);

/// Pointwise F(|u|^2) as a real grid function.
RealField potential_density(const ComplexField& u);

}  // namespace satnls
