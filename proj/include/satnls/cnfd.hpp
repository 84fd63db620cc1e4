#pragma once

#include "satnls/grid.hpp"
#include "satnls/saturable.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace satnls {

/// Additive forcing r(x, y, t): the evolved equation becomes
/// i u_t + Lap u + lambda u|u|^2/(1+|u|^2) + i eps u|u|^2 = r.
using SourceFn = std::function<ComplexField(double t)>;

struct CnfdRunConfig {
  Grid2D grid;
  PhysicsParams params;
  double fp_tol = 1e-8;
  int fp_max_iters = 50;
  double lin_tol = 1e-10;
  int lin_max_iters = 0;  // 0 selects 10 * max(J, K)
  std::vector<double> snapshot_times;
  SourceFn source;  // optional; sampled at t_{n+1/2}

  void validate() const;
  int linear_iteration_cap() const;
};

struct StepDiagnostics {
  int n = 0;
  double t = 0.0;
  int fp_iters = 0;
  double residual = 0.0;  // last relative fixed-point increment
  double mass = 0.0;      // ||U^n||^2_{2,h}
  double energy = 0.0;    // E_h(U^n)
  double wall_ms = 0.0;
  int lin_iters = 0;      // Krylov iterations summed over the step
};

struct Trajectory {
  std::vector<double> snapshot_times;
  std::vector<ComplexField> snapshots;
  std::vector<StepDiagnostics> diagnostics;  // row 0 describes U^0
  std::vector<std::string> warnings;
};

/// Called with (n, t_n, U^n) for the initial state and after every step.
using StepObserver = std::function<void(int, double, const ComplexField&)>;

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// A run that stopped early; carries everything produced before the failure.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Interior values of i (U^{n+1}-U^n)/tau + Lap_h U^{n+1/2} + lambda psi + i eps phi,
/// minus the forcing when one is given. Zero on the boundary.
ComplexField cnfd_residual(const ComplexField& next, const ComplexField& cur,
                           const CnfdRunConfig& cfg, const ComplexField* source = nullptr);

/// Linear system of one fixed-point sweep,
///
///   i W/tau + (1/2) Lap_h W + (1/2) D W = i U/tau - (1/2) Lap_h U - (1/2) D U + r,
///
/// with the pointwise coefficient D = lambda q + i eps m^2 frozen at the
/// previous iterate. Unknowns are the interior nodes in row-major order.
class StepSystem {
 public:
  StepSystem(const Grid2D& grid, double tau, FieldArray<Complex> coeff, ComplexField rhs);

  const Grid2D& grid() const { return grid_; }
  double tau() const { return tau_; }
  /// D on every node (only interior values enter the operator).
  const FieldArray<Complex>& coefficient() const { return coeff_; }
  const ComplexField& rhs() const { return rhs_; }

  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(grid_.J - 1) * (grid_.K - 1); }

  /// Operator applied to a grid function; boundary of the result is zero.
  ComplexField apply(const ComplexField& w) const;

  /// out = A w on interior vectors.
  void apply_interior(const Complex* w, Complex* out) const;

  Eigen::VectorXcd rhs_interior() const;
  Eigen::VectorXcd interior_of(const ComplexField& u) const;
  ComplexField field_from_interior(const Eigen::VectorXcd& v) const;

  /// Dense assembly for small test grids (at most 64x64 nodes).
  Eigen::MatrixXcd dense() const;

 private:
  Grid2D grid_;
  double tau_;
  FieldArray<Complex> coeff_;
  FieldArray<Complex> center_;  // interior diagonal of A
  ComplexField rhs_;
};

StepSystem build_step_system(const ComplexField& cur, const ComplexField& iterate,
                             const CnfdRunConfig& cfg, const ComplexField* source = nullptr);

struct LinearSolve {
  ComplexField solution;
  int iterations = 0;
  double residual = 0.0;  // ||A W - b|| / ||b||
};

/// Matrix-free BiCGSTAB. Throws SolverError when the relative residual does
/// not reach tol within max_iters.
LinearSolve solve_linear(const StepSystem& sys, double tol, int max_iters,
                         const ComplexField* guess = nullptr);

/// Dense LU reference solve, restricted to small grids.
ComplexField solve_linear_dense(const StepSystem& sys);

struct StepResult {
  ComplexField next;
  StepDiagnostics diag;
};

/// One CNFD step: fixed-point sweeps starting from U^{n,0} = U^n until the
/// relative increment drops to fp_tol.
StepResult cnfd_step(const ComplexField& cur, const CnfdRunConfig& cfg, int n = 0);

/// N steps of the scheme with snapshots at the configured times.
Trajectory run_cnfd(const ComplexField& u0, const CnfdRunConfig& cfg, const StepObserver& observer = {});
Trajectory run_cnfd(const ComplexField& u0, const CnfdRunConfig& cfg, int steps,
                    const StepObserver& observer = {});

/// Maps requested snapshot times onto step indices; throws when a time is
/// not on the t_n lattice or lies beyond `steps`.
std::vector<int> snapshot_steps(const std::vector<double>& times, double tau, int steps);

/// n,t,fp_iters,lin_iters,residual,mass,energy
void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& diags);

}  // namespace satnls
