#pragma once

#include "satnls/aitem.hpp"
#include "satnls/grid.hpp"
#include "satnls/saturable.hpp"
#include "satnls/spectral.hpp"

namespace satnls {

/// Moving-soliton launch parameters: amplitude, centre, velocity and phase.
struct SolitonParams {
  double A0 = 1.0;
  double x0 = -5.0, y0 = 4.5;
  double d1 = 2.0, d2 = -1.8;
  double alpha0 = 0.0;

  // The launch phase tilts with half the velocity.
  double d1_tilde() const { return 0.5 * d1; }
  double d2_tilde() const { return 0.5 * d2; }

  void validate() const;
};

/// u0 = A0 v0(X0, Y0) exp(i alpha0 + i (d1~ X0 + d2~ Y0)), X0 = x - x0, Y0 = y - y0.
/// v0 must already be centred at (x0, y0). Throws if the boundary carries
/// more than 1e-8 of the power before it is zeroed.
ComplexField build_initial_condition(const RealField& v0, const SolitonParams& p);
ComplexField build_initial_condition(const GroundState& v0, const SolitonParams& p);

/// A(t) = A0 [1 + 2 eps ||u0||_4^4 ||u0||_2^{-2} A0^4 t]^{-1/2}, with the
/// norms evaluated once on the grid.
class AmplitudeLaw {
 public:
  AmplitudeLaw(const ComplexField& u0, const SolitonParams& p, const PhysicsParams& params);
  /// Same law for a launch profile with modulus A0 * v.
  static AmplitudeLaw from_profile(const RealField& v, const SolitonParams& p, const PhysicsParams& params);

  double operator()(double t) const;
  double decay_rate() const { return rate_; }

 private:
  AmplitudeLaw(double A0, double rate) : A0_(A0), rate_(rate) {}
  double A0_;
  double rate_;  // 2 eps ||u0||_4^4 ||u0||_2^{-2} A0^4
};

double amplitude_theory(double t, const ComplexField& u0, const SolitonParams& p, const PhysicsParams& params);

/// How the ground state is translated to a non-grid-aligned centre.
enum class ShiftMethod { Bilinear, Fourier };

/// |u_th(x, y, t)| = A(t) v(x - x0 - d1 t, y - y0 - d2 t) for v centred at
/// (x0, y0); boundary nodes are zero. Fourier shifting needs a workspace on
/// v's grid.
RealField theoretical_profile_modulus(const RealField& v, const SolitonParams& p, const PhysicsParams& params,
                                      double t, ShiftMethod method = ShiftMethod::Bilinear,
                                      SpectralWorkspace* ws = nullptr);
RealField theoretical_profile_modulus(const GroundState& v, const SolitonParams& p,
                                      const PhysicsParams& params, double t,
                                      ShiftMethod method = ShiftMethod::Bilinear,
                                      SpectralWorkspace* ws = nullptr);

/// Translates v by (sx, sy); values falling outside the box are zero.
RealField shift_bilinear(const RealField& v, double sx, double sy);
/// Translates v by (sx, sy) on the periodic cell with a Fourier phase ramp.
RealField shift_fourier(const RealField& v, double sx, double sy, SpectralWorkspace& ws);

/// max |u| / max v_ref over all nodes.
double measure_amplitude(const ComplexField& u, const RealField& vref);
double measure_amplitude(const ComplexField& u, const GroundState& vref);

/// A0 sqrt(||u||^2_{2,h} / ||u0||^2_{2,h}): the amplitude of a profile-preserving
/// soliton carrying the current power.
double measure_amplitude_power(const ComplexField& u, const ComplexField& u0, const SolitonParams& p);

enum class AmplitudeMethod { Power, Peak };

}  // namespace satnls
