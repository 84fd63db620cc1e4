#include "satnls/spectral.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace satnls {

PeriodicField to_periodic(const ComplexField& u) {
  return u.values.topLeftCorner(u.grid.J, u.grid.K);
}

ComplexField from_periodic(const PeriodicField& cell, const Grid2D& grid) {
  if (cell.rows() != grid.J || cell.cols() != grid.K)
    throw std::invalid_argument("from_periodic: cell shape does not match grid");
  ComplexField u(grid);
  u.values.topLeftCorner(grid.J, grid.K) = cell;
  u.zero_boundary();
  return u;
}

double boundary_tail(const PeriodicField& cell) {
  return std::max(cell.row(0).abs().maxCoeff(), cell.col(0).abs().maxCoeff());
}

void set_fft_threads(int threads) {
  static bool initialised = false;
  if (!initialised) {
    fftw_init_threads();
    initialised = true;
  }
  fftw_plan_with_nthreads(std::max(1, threads));
}

const char* fft_library_version() { return fftw_version; }

// ---------------------------------------------------------------------------

struct SpectralWorkspace::Impl {
  Grid2D grid;
  int J = 0, K = 0;
  Eigen::VectorXd kx, ky;
  FieldArray<double> k2;
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  double cached_dt = std::numeric_limits<double>::quiet_NaN();
  FieldArray<Complex> prop;

  explicit Impl(const Grid2D& g) : grid(g), J(g.J), K(g.K) {
    kx = wavenumbers(J, g.b - g.a);
    ky = wavenumbers(K, g.d - g.c);
    k2.resize(J, K);
    for (int j = 0; j < J; ++j) k2.row(j) = kx(j) * kx(j) + ky.array().square().transpose();
    const std::size_t count = static_cast<std::size_t>(J) * static_cast<std::size_t>(K);
    buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
    if (!buf) throw std::bad_alloc();
    fwd = fftw_plan_dft_2d(J, K, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_dft_2d(J, K, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd || !inv) throw std::runtime_error("FFTW planning failed");
  }

  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    if (buf) fftw_free(buf);
  }

  static Eigen::VectorXd wavenumbers(int n, double length) {
    Eigen::VectorXd k(n);
    const double base = 2.0 * std::numbers::pi / length;
    for (int i = 0; i < n; ++i) k(i) = base * (i < (n + 1) / 2 ? i : i - n);
    return k;
  }

  void run(fftw_plan plan, PeriodicField& a) {
    if (a.rows() != J || a.cols() != K) throw std::invalid_argument("SpectralWorkspace: shape mismatch");
    const std::size_t bytes = sizeof(fftw_complex) * static_cast<std::size_t>(a.size());
    std::memcpy(static_cast<void*>(buf), static_cast<const void*>(a.data()), bytes);
    fftw_execute(plan);
    std::memcpy(static_cast<void*>(a.data()), static_cast<const void*>(buf), bytes);
  }
};

SpectralWorkspace::SpectralWorkspace(const Grid2D& grid) : impl_(std::make_unique<Impl>(grid)) {}
SpectralWorkspace::~SpectralWorkspace() = default;
SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&&) noexcept = default;
SpectralWorkspace& SpectralWorkspace::operator=(SpectralWorkspace&&) noexcept = default;

const Grid2D& SpectralWorkspace::grid() const { return impl_->grid; }
int SpectralWorkspace::rows() const { return impl_->J; }
int SpectralWorkspace::cols() const { return impl_->K; }
const Eigen::VectorXd& SpectralWorkspace::kx() const { return impl_->kx; }
const Eigen::VectorXd& SpectralWorkspace::ky() const { return impl_->ky; }
const FieldArray<double>& SpectralWorkspace::k_squared() const { return impl_->k2; }

void SpectralWorkspace::forward(PeriodicField& a) { impl_->run(impl_->fwd, a); }

void SpectralWorkspace::inverse(PeriodicField& a) {
  impl_->run(impl_->inv, a);
  a *= 1.0 / static_cast<double>(a.size());
}

const FieldArray<Complex>& SpectralWorkspace::propagator(double dt) {
  if (dt != impl_->cached_dt) {
    impl_->prop = (impl_->k2 * (-dt)).unaryExpr([](double ph) { return std::polar(1.0, ph); });
    impl_->cached_dt = dt;
  }
  return impl_->prop;
}

PeriodicField SpectralWorkspace::apply_multiplier(const PeriodicField& a, const FieldArray<double>& m) {
  PeriodicField out = a;
  forward(out);
  out *= m;
  inverse(out);
  return out;
}

PeriodicField SpectralWorkspace::laplacian(const PeriodicField& a) {
  PeriodicField out = a;
  forward(out);
  out *= -impl_->k2;
  inverse(out);
  return out;
}

// ---------------------------------------------------------------------------

void linear_substep(PeriodicField& u, double dt, SpectralWorkspace& ws) {
  ws.forward(u);
  u *= ws.propagator(dt);
  ws.inverse(u);
}

ComplexField linear_substep(const ComplexField& u, double dt, SpectralWorkspace& ws) {
  if (!u.grid.same_nodes(ws.grid())) throw std::invalid_argument("linear_substep: grid mismatch");
  PeriodicField cell = to_periodic(u);
  linear_substep(cell, dt, ws);
  return from_periodic(cell, u.grid);
}

Complex nonlinear_flow(Complex u, double dt, const PhysicsParams& params) {
  const double rho0 = std::norm(u);
  if (rho0 == 0.0) return u;
  double scale = 1.0, phase;
  if (params.epsilon > 0.0) {
    const double growth = 2.0 * params.epsilon * rho0 * dt;
    scale = 1.0 / std::sqrt(1.0 + growth);
    phase = params.lambda / (2.0 * params.epsilon) * std::log1p(growth / (1.0 + rho0));
  } else {
    phase = params.lambda * dt * rho0 / (1.0 + rho0);
  }
  return u * scale * std::polar(1.0, phase);
}

void nonlinear_substep(PeriodicField& u, double dt, const PhysicsParams& params) {
  u = u.unaryExpr([&](Complex z) { return nonlinear_flow(z, dt, params); });
}

ComplexField nonlinear_substep(const ComplexField& u, double dt, const PhysicsParams& params) {
  ComplexField out = u;
  nonlinear_substep(out.values, dt, params);
  return out;
}

void strang_step(PeriodicField& u, double dt, const PhysicsParams& params, SpectralWorkspace& ws,
                 const PeriodicField* forcing) {
  linear_substep(u, 0.5 * dt, ws);
  if (forcing) {
    nonlinear_substep(u, 0.5 * dt, params);
    u -= Complex(0.0, dt) * (*forcing);
    nonlinear_substep(u, 0.5 * dt, params);
  } else {
    nonlinear_substep(u, dt, params);
  }
  linear_substep(u, 0.5 * dt, ws);
}

ComplexField strang_step(const ComplexField& u, double dt, const PhysicsParams& params,
                         SpectralWorkspace& ws) {
  if (!u.grid.same_nodes(ws.grid())) throw std::invalid_argument("strang_step: grid mismatch");
  PeriodicField cell = to_periodic(u);
  strang_step(cell, dt, params, ws);
  return from_periodic(cell, u.grid);
}

// ---------------------------------------------------------------------------

SsfmTrajectory run_ssfm(const ComplexField& u0, const SsfmRunConfig& cfg, const StepObserver& observer) {
  return run_ssfm(u0, cfg, cfg.grid.N, observer);
}

SsfmTrajectory run_ssfm(const ComplexField& u0, const SsfmRunConfig& cfg, int steps,
                        const StepObserver& observer) {
  cfg.params.validate();
  if (!u0.grid.same_nodes(cfg.grid)) throw std::invalid_argument("run_ssfm: grid mismatch");
  if (!u0.all_finite()) throw std::invalid_argument("run_ssfm: initial field is not finite");
  const Grid2D& g = cfg.grid;
  const std::vector<int> snap = snapshot_steps(cfg.snapshot_times, g.tau, steps);

  SpectralWorkspace ws(g);
  PeriodicField cell = to_periodic(u0);
  SsfmTrajectory traj;

  auto describe = [&](int n, const ComplexField& exported) {
    StepDiagnostics d;
    d.n = n;
    d.t = g.t(n);
    d.mass = g.cell_area() * detail::sum_rows<double>(g.J, [&](int j) { return cell.row(j).abs2().sum(); });
    d.energy = energy_Eh(exported, cfg.params);
    return d;
  };
  auto publish = [&](int n, const ComplexField& exported) {
    for (std::size_t i = 0; i < snap.size(); ++i)
      if (snap[i] == n) {
        traj.snapshot_times.push_back(cfg.snapshot_times[i]);
        traj.snapshots.push_back(exported);
      }
    if (observer) observer(n, g.t(n), exported);
  };

  {
    const ComplexField exported = from_periodic(cell, g);
    traj.diagnostics.push_back(describe(0, exported));
    traj.max_boundary_tail = boundary_tail(cell);
    publish(0, exported);
  }
  for (int n = 0; n < steps; ++n) {
    const auto start = std::chrono::steady_clock::now();
    PeriodicField forcing;
    if (cfg.source) {
      const ComplexField r = cfg.source(g.t(n) + 0.5 * g.tau);
      require_same_grid(r, u0);
      forcing = to_periodic(r);
    }
    strang_step(cell, g.tau, cfg.params, ws, cfg.source ? &forcing : nullptr);
    if (!cell.allFinite()) {
      std::ostringstream msg;
      msg << "SSFM step " << n + 1 << " produced non-finite values";
      throw RunAborted(msg.str(), std::move(traj));
    }
    traj.max_boundary_tail = std::max(traj.max_boundary_tail, boundary_tail(cell));
    const ComplexField exported = from_periodic(cell, g);
    StepDiagnostics d = describe(n + 1, exported);
    d.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    traj.diagnostics.push_back(d);
    publish(n + 1, exported);
  }
  return traj;
}

}  // namespace satnls
