#pragma once

#include "satnls/cnfd.hpp"
#include "satnls/grid.hpp"
#include "satnls/spectral.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace satnls {

/// Power-normalised accelerated imaginary-time iteration for
///   Lap v + coupling * v^3/(1+v^2) = mu v,   ||v||^2_{2,h} = target_power,
/// preconditioned by M = c - Lap and evaluated spectrally on the periodic
/// cell of the grid.
struct AitemConfig {
  double dt = 1.2;
  double c = 1.5;
  double tol = 1e-10;
  int max_iters = 20000;
  double target_power = 22.5;
  double coupling = 1.0;  // 0 removes the nonlinear term

  void validate() const;
};

struct AitemStep {
  RealField v;           // updated, rescaled iterate
  double mu = 0.0;       // propagation constant of the input iterate
  double residual = 0.0; // ||L0 v - mu v|| / ||v|| of the input iterate
};

struct GroundState {
  RealField v;
  double mu = 0.0;
  double power = 0.0;
  double residual = 0.0;            // periodic-cell residual at convergence
  double projection_residual = 0.0;  // same residual after zeroing the boundary
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<std::string> warnings;
};

class AitemError : public SolverError {
 public:
  AitemError(const std::string& what, std::vector<double> history)
      : SolverError(what, history.empty() ? 0.0 : history.back(), static_cast<int>(history.size())),
        history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Rescales v so that ||v||^2_{2,h} = power.
void normalize_power(RealField& v, double power);

/// Residual ||Lap v + coupling v^3/(1+v^2) - mu v||_{2,h} / ||v||_{2,h} with the
/// spectral Laplacian on the periodic cell.
double ground_state_residual(const RealField& v, double mu, double coupling, SpectralWorkspace& ws);

/// One preconditioned update followed by power rescaling. Row J and column K
/// of the input are ignored (they alias row 0 and column 0) and are zero in
/// the output.
AitemStep aitem_iterate(const RealField& v, const AitemConfig& cfg, SpectralWorkspace& ws);

/// Iterates until the residual drops to cfg.tol, then zeroes the boundary.
GroundState solve_ground_state(const RealField& initial_guess, const AitemConfig& cfg,
                               SpectralWorkspace& ws);

/// sech((x-x0)^2 + (y-y0)^2) on every node.
RealField sech_squared_radius_seed(const Grid2D& grid, double x0, double y0);

/// Writes v as an FLD1 snapshot (imaginary part zero) and a key = value
/// sidecar with mu, power, residuals, iterations and the solver settings.
void write_ground_state(const std::filesystem::path& fld_path, const std::filesystem::path& sidecar_path,
                        const GroundState& gs, const AitemConfig& cfg);

}  // namespace satnls
