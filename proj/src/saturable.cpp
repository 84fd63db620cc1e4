#include "satnls/saturable.hpp"

#include <stdexcept>

namespace satnls {

void PhysicsParams::validate() const {
  if (!std::isfinite(lambda)) throw std::invalid_argument("physics.lambda must be finite");
  if (!std::isfinite(epsilon) || epsilon < 0.0)
    throw std::invalid_argument("physics.epsilon must be finite and >= 0");
}

double f_sat(double s) {
  if (!(s >= 0.0)) throw std::domain_error("f_sat: argument must be >= 0");
  return kernel::f_sat(s);
}

double F_potential(double rho) {
  if (!(rho >= 0.0)) throw std::domain_error("F_potential: argument must be >= 0");
  return kernel::F_potential(rho);
}

double diff_quotient_F(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw std::domain_error("diff_quotient_F: arguments must be >= 0");
  return kernel::diff_quotient_F(a, b);
}

Complex psi(Complex z, Complex w) { return kernel::psi(z, w); }

Complex phi(Complex z, Complex w) { return kernel::phi(z, w); }

RealField potential_density(const ComplexField& u) {
  RealField out(u.grid);
  out.values = u.values.abs2().unaryExpr([](double r) { return kernel::F_potential(r); });
  return out;
}

double energy_calEh(const ComplexField& u) { return seminorm_1h_squared(u); }

double energy_Eh(const ComplexField& u, const PhysicsParams& params) {
  // F >= 0, so the p = 1 norm is the plain weighted sum.
  return seminorm_1h_squared(u) - params.lambda * norm_ph(potential_density(u), 1.0);
}

}  // namespace satnls
