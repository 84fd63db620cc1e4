#include "satnls/soliton.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace satnls {

void SolitonParams::validate() const {
  for (double v : {A0, x0, y0, d1, d2, alpha0})
    if (!std::isfinite(v)) throw std::invalid_argument("soliton parameters must be finite");
  if (!(A0 > 0.0)) throw std::invalid_argument("soliton.A0 must be > 0");
}

ComplexField build_initial_condition(const RealField& v0, const SolitonParams& p) {
  p.validate();
  const Grid2D& g = v0.grid;
  const double total = g.cell_area() * v0.values.square().sum();
  if (!(total > 0.0)) throw std::invalid_argument("build_initial_condition: zero ground state");
  RealField interior = v0;
  interior.zero_boundary();
  const double lost = total - g.cell_area() * interior.values.square().sum();
  if (lost > 1e-8 * total) {
    std::ostringstream msg;
    msg << "build_initial_condition: " << lost / total << " of the power lies on the boundary";
    throw std::invalid_argument(msg.str());
  }
  ComplexField u(g);
  for (int j = 1; j < g.J; ++j)
    for (int k = 1; k < g.K; ++k) {
      const double X0 = g.x(j) - p.x0, Y0 = g.y(k) - p.y0;
      const double phase = p.alpha0 + p.d1_tilde() * X0 + p.d2_tilde() * Y0;
      u(j, k) = p.A0 * interior(j, k) * std::polar(1.0, phase);
    }
  return u;
}

ComplexField build_initial_condition(const GroundState& v0, const SolitonParams& p) {
  return build_initial_condition(v0.v, p);
}

// ---------------------------------------------------------------------------

AmplitudeLaw::AmplitudeLaw(const ComplexField& u0, const SolitonParams& p, const PhysicsParams& params)
    : A0_(p.A0), rate_(0.0) {
  const double l2sq = norm_2h_squared(u0);
  if (!(l2sq > 0.0)) throw std::invalid_argument("AmplitudeLaw: zero initial field");
  const double l4 = norm_ph(u0, 4.0);
  const double l4_4 = l4 * l4 * l4 * l4;
  rate_ = 2.0 * params.epsilon * l4_4 / l2sq * std::pow(p.A0, 4);
}

AmplitudeLaw AmplitudeLaw::from_profile(const RealField& v, const SolitonParams& p, const PhysicsParams& params) {
  const ComplexField u0(v.grid, (p.A0 * v.values).cast<Complex>());
  return AmplitudeLaw(u0, p, params);
}

double AmplitudeLaw::operator()(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("AmplitudeLaw: t must be >= 0");
  return A0_ / std::sqrt(1.0 + rate_ * t);
}

double amplitude_theory(double t, const ComplexField& u0, const SolitonParams& p, const PhysicsParams& params) {
  return AmplitudeLaw(u0, p, params)(t);
}

// ---------------------------------------------------------------------------

RealField shift_bilinear(const RealField& v, double sx, double sy) {
  const Grid2D& g = v.grid;
  RealField out(g);
  for (int j = 0; j <= g.J; ++j) {
    const double fx = (g.x(j) - sx - g.a) / g.dx;
    const double jf = std::floor(fx);
    const int j0 = static_cast<int>(jf);
    if (j0 < 0 || j0 > g.J) continue;
    const double wx = fx - jf;
    const int j1 = std::min(j0 + 1, g.J);
    if (j0 == g.J && wx > 0.0) continue;
    for (int k = 0; k <= g.K; ++k) {
      const double fy = (g.y(k) - sy - g.c) / g.dy;
      const double kf = std::floor(fy);
      const int k0 = static_cast<int>(kf);
      if (k0 < 0 || k0 > g.K) continue;
      const double wy = fy - kf;
      const int k1 = std::min(k0 + 1, g.K);
      if (k0 == g.K && wy > 0.0) continue;
      out(j, k) = (1 - wx) * (1 - wy) * v(j0, k0) + wx * (1 - wy) * v(j1, k0) + (1 - wx) * wy * v(j0, k1) +
                  wx * wy * v(j1, k1);
    }
  }
  return out;
}

RealField shift_fourier(const RealField& v, double sx, double sy, SpectralWorkspace& ws) {
  const Grid2D& g = v.grid;
  if (!g.same_nodes(ws.grid())) throw std::invalid_argument("shift_fourier: grid mismatch");
  PeriodicField cell = v.values.topLeftCorner(g.J, g.K).cast<Complex>();
  ws.forward(cell);
  const Eigen::VectorXd& kx = ws.kx();
  const Eigen::VectorXd& ky = ws.ky();
  for (int j = 0; j < g.J; ++j)
    for (int k = 0; k < g.K; ++k) cell(j, k) *= std::polar(1.0, -(kx(j) * sx + ky(k) * sy));
  ws.inverse(cell);
  RealField out(g);
  out.values.topLeftCorner(g.J, g.K) = cell.real();
  return out;
}

RealField theoretical_profile_modulus(const RealField& v, const SolitonParams& p, const PhysicsParams& params,
                                      double t, ShiftMethod method, SpectralWorkspace* ws) {
  p.validate();
  const Grid2D& g = v.grid;
  const double xc = p.x0 + p.d1 * t, yc = p.y0 + p.d2 * t;
  if (xc < g.a || xc > g.b || yc < g.c || yc > g.d) {
    std::ostringstream msg;
    msg << "theoretical profile centre (" << xc << ", " << yc << ") at t = " << t << " left the domain";
    throw std::invalid_argument(msg.str());
  }
  const double A = AmplitudeLaw::from_profile(v, p, params)(t);
  RealField shifted;
  if (method == ShiftMethod::Fourier) {
    if (!ws) throw std::invalid_argument("theoretical_profile_modulus: Fourier shift needs a workspace");
    shifted = shift_fourier(v, p.d1 * t, p.d2 * t, *ws);
  } else {
    shifted = shift_bilinear(v, p.d1 * t, p.d2 * t);
  }
  shifted.values *= A;
  shifted.zero_boundary();
  return shifted;
}

RealField theoretical_profile_modulus(const GroundState& v, const SolitonParams& p, const PhysicsParams& params,
                                      double t, ShiftMethod method, SpectralWorkspace* ws) {
  return theoretical_profile_modulus(v.v, p, params, t, method, ws);
}

double measure_amplitude(const ComplexField& u, const RealField& vref) {
  const double peak = vref.values.abs().maxCoeff();
  if (!(peak > 0.0)) throw std::invalid_argument("measure_amplitude: reference peak is zero");
  return u.values.abs().maxCoeff() / peak;
}

double measure_amplitude(const ComplexField& u, const GroundState& vref) { return measure_amplitude(u, vref.v); }

double measure_amplitude_power(const ComplexField& u, const ComplexField& u0, const SolitonParams& p) {
  require_same_grid(u, u0);
  const double p0 = norm_2h_squared(u0);
  if (!(p0 > 0.0)) throw std::invalid_argument("measure_amplitude_power: reference power is zero");
  return p.A0 * std::sqrt(norm_2h_squared(u) / p0);
}

}  // namespace satnls
