#pragma once

#include "satnls/cnfd.hpp"
#include "satnls/grid.hpp"
#include "satnls/saturable.hpp"

#include <memory>
#include <vector>

namespace satnls {

/// Values on the periodic cell j = 0..J-1, k = 0..K-1 of a grid; node J
/// (resp. K) is identified with node 0.
using PeriodicField = FieldArray<Complex>;

/// Drops the identified last row and column.
PeriodicField to_periodic(const ComplexField& u);

/// Places the cell back on the grid and zeroes every boundary node.
ComplexField from_periodic(const PeriodicField& cell, const Grid2D& grid);

/// Largest modulus on the cell's boundary lines (row 0 and column 0).
double boundary_tail(const PeriodicField& cell);

/// Number of threads FFTW may use for plans created afterwards.
void set_fft_threads(int threads);

/// Version string of the FFT backend.
const char* fft_library_version();

/// FFT plans and wavenumbers for the periodic extension of a grid's box.
/// Single owner: plans are stateful and share one transform buffer.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid2D& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(SpectralWorkspace&&) noexcept;
  SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept;
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const Grid2D& grid() const;
  int rows() const;
  int cols() const;

  /// Angular wavenumbers in standard DFT order.
  const Eigen::VectorXd& kx() const;
  const Eigen::VectorXd& ky() const;
  /// kx^2 + ky^2 on the cell.
  const FieldArray<double>& k_squared() const;

  /// Unnormalised forward DFT.
  void forward(PeriodicField& a);
  /// Inverse DFT including the 1/(J K) factor.
  void inverse(PeriodicField& a);

  /// exp(-i |k|^2 dt); the last requested dt is cached.
  const FieldArray<Complex>& propagator(double dt);

  /// Spectral Laplacian of a cell field.
  PeriodicField laplacian(const PeriodicField& a);

  /// Applies a real Fourier multiplier m(k) (given on the cell) to a.
  PeriodicField apply_multiplier(const PeriodicField& a, const FieldArray<double>& m);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Exact flow of i u_t + Lap u = 0 over dt.
void linear_substep(PeriodicField& u, double dt, SpectralWorkspace& ws);
ComplexField linear_substep(const ComplexField& u, double dt, SpectralWorkspace& ws);

/// Exact pointwise flow of i u_t + lambda u|u|^2/(1+|u|^2) + i eps u|u|^2 = 0:
/// rho(dt) = rho0 / (1 + 2 eps rho0 dt) and the phase advances by
/// (lambda / 2 eps) log((1 + rho0 + 2 eps rho0 dt)/(1 + rho0)), or by
/// lambda dt rho0/(1+rho0) when eps = 0.
Complex nonlinear_flow(Complex u, double dt, const PhysicsParams& params);
void nonlinear_substep(PeriodicField& u, double dt, const PhysicsParams& params);
ComplexField nonlinear_substep(const ComplexField& u, double dt, const PhysicsParams& params);

/// Strang step: half linear, full nonlinear, half linear. A forcing r
/// (sampled at the step midpoint) enters as u -= i dt r between two
/// nonlinear half steps.
void strang_step(PeriodicField& u, double dt, const PhysicsParams& params, SpectralWorkspace& ws,
                 const PeriodicField* forcing = nullptr);
ComplexField strang_step(const ComplexField& u, double dt, const PhysicsParams& params,
                         SpectralWorkspace& ws);

struct SsfmRunConfig {
  Grid2D grid;
  PhysicsParams params;
  std::vector<double> snapshot_times;
  SourceFn source;
};

struct SsfmTrajectory : Trajectory {
  /// Largest boundary modulus seen on the periodic cell during the run.
  double max_boundary_tail = 0.0;
};

/// Same snapshot and diagnostics contract as run_cnfd. Snapshots and
/// observer fields have their boundary zeroed; mass is measured on the
/// periodic cell.
SsfmTrajectory run_ssfm(const ComplexField& u0, const SsfmRunConfig& cfg,
                        const StepObserver& observer = {});
SsfmTrajectory run_ssfm(const ComplexField& u0, const SsfmRunConfig& cfg, int steps,
                        const StepObserver& observer = {});

}  // namespace satnls
