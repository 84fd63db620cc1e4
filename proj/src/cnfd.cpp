#include "satnls/cnfd.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace satnls::detail {
class StepOperator;
}

namespace Eigen::internal {
template <>
struct traits<satnls::detail::StepOperator>
    : public Eigen::internal::traits<Eigen::SparseMatrix<std::complex<double>>> {};
}  // namespace Eigen::internal

namespace satnls::detail {

// Exposes StepSystem to Eigen's iterative solvers as a matrix-free operator.
class StepOperator : public Eigen::EigenBase<StepOperator> {
 public:
  using Scalar = Complex;
  using RealScalar = double;
  using StorageIndex = int;
  enum {
    ColsAtCompileTime = Eigen::Dynamic,
    MaxColsAtCompileTime = Eigen::Dynamic,
    IsRowMajor = false
  };

  explicit StepOperator(const StepSystem& sys) : sys_(&sys), scratch_(sys.unknowns()) {}

  Eigen::Index rows() const { return sys_->unknowns(); }
  Eigen::Index cols() const { return sys_->unknowns(); }

  template <typename Rhs>
  Eigen::Product<StepOperator, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<StepOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  const StepSystem& system() const { return *sys_; }
  Eigen::VectorXcd& scratch() const { return scratch_; }

 private:
  const StepSystem* sys_;
  mutable Eigen::VectorXcd scratch_;
};

}  // namespace satnls::detail

namespace Eigen::internal {

template <typename Rhs>
struct generic_product_impl<satnls::detail::StepOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<satnls::detail::StepOperator, Rhs,
                                generic_product_impl<satnls::detail::StepOperator, Rhs>> {
  using Scalar = typename Product<satnls::detail::StepOperator, Rhs>::Scalar;

  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const satnls::detail::StepOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    Eigen::VectorXcd& out = lhs.scratch();
    if constexpr (std::is_same_v<Rhs, Eigen::VectorXcd>) {
      lhs.system().apply_interior(rhs.data(), out.data());
    } else {
      const Eigen::VectorXcd x = rhs;
      lhs.system().apply_interior(x.data(), out.data());
    }
    dst.noalias() += alpha * out;
  }
};

}  // namespace Eigen::internal

namespace satnls {

void CnfdRunConfig::validate() const {
  params.validate();
  if (!(fp_tol > 0.0 && fp_tol < 1.0)) throw std::invalid_argument("cnfd.fp_tol must lie in (0,1)");
  if (!(lin_tol > 0.0 && lin_tol < 1.0)) throw std::invalid_argument("cnfd.lin_tol must lie in (0,1)");
  if (lin_tol > fp_tol / 10.0) throw std::invalid_argument("cnfd.lin_tol must be <= fp_tol/10");
  if (fp_max_iters < 1) throw std::invalid_argument("cnfd.fp_max_iters must be >= 1");
  if (lin_max_iters < 0) throw std::invalid_argument("cnfd.lin_max_iters must be >= 0");
}

int CnfdRunConfig::linear_iteration_cap() const {
  return lin_max_iters > 0 ? lin_max_iters : 10 * std::max(grid.J, grid.K);
}

// ---------------------------------------------------------------------------

ComplexField cnfd_residual(const ComplexField& next, const ComplexField& cur,
                           const CnfdRunConfig& cfg, const ComplexField* source) {
  require_same_grid(next, cur);
  if (!next.grid.same_nodes(cfg.grid)) throw std::invalid_argument("cnfd_residual: grid mismatch");
  if (source) require_same_grid(*source, cur);
  const Grid2D& g = cfg.grid;
  const double tau = g.tau;
  const Complex I(0.0, 1.0);
  const PhysicsParams& p = cfg.params;

  ComplexField mid(g, 0.5 * (next.values + cur.values));
  ComplexField out = laplacian_5pt(mid);
  for (int j = 1; j < g.J; ++j)
    for (int k = 1; k < g.K; ++k) {
      const Complex z = next.values(j, k), w = cur.values(j, k);
      Complex r = out.values(j, k) + I * (z - w) / tau + p.lambda * kernel::psi(z, w) +
                  I * p.epsilon * kernel::phi(z, w);
      if (source) r -= source->values(j, k);
      out.values(j, k) = r;
    }
  return out;
}

// ---------------------------------------------------------------------------

StepSystem::StepSystem(const Grid2D& grid, double tau, FieldArray<Complex> coeff, ComplexField rhs)
    : grid_(grid), tau_(tau), coeff_(std::move(coeff)), rhs_(std::move(rhs)) {
  if (coeff_.rows() != grid.nx() || coeff_.cols() != grid.ny())
    throw std::invalid_argument("StepSystem: coefficient shape mismatch");
  if (!rhs_.grid.same_nodes(grid)) throw std::invalid_argument("StepSystem: rhs grid mismatch");
  const int m = grid.J - 1, n = grid.K - 1;
  const Complex diag = Complex(0.0, 1.0 / tau) - (1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy));
  center_ = diag + 0.5 * coeff_.block(1, 1, m, n);
}

void StepSystem::apply_interior(const Complex* w, Complex* out) const {
  // One pass per row over interleaved (re, im) pairs; the stencil is
  // center * w + cx * (north + south) + cy * (west + east).
  const int m = grid_.J - 1, n = grid_.K - 1;
  const double cx = 0.5 / (grid_.dx * grid_.dx), cy = 0.5 / (grid_.dy * grid_.dy);
  const double* W = reinterpret_cast<const double*>(w);
  const double* C = reinterpret_cast<const double*>(center_.data());
  double* O = reinterpret_cast<double*>(out);
  const std::ptrdiff_t stride = 2 * static_cast<std::ptrdiff_t>(n);
  for (int r = 0; r < m; ++r) {
    const double* wr = W + r * stride;
    const double* cr = C + r * stride;
    const double* up = r > 0 ? wr - stride : nullptr;
    const double* dn = r + 1 < m ? wr + stride : nullptr;
    double* o = O + r * stride;
    for (int c = 0; c < n; ++c) {
      const std::ptrdiff_t i = 2 * c;
      double re = cr[i] * wr[i] - cr[i + 1] * wr[i + 1];
      double im = cr[i] * wr[i + 1] + cr[i + 1] * wr[i];
      double nre = 0.0, nim = 0.0;
      if (up) nre += up[i], nim += up[i + 1];
      if (dn) nre += dn[i], nim += dn[i + 1];
      double ere = 0.0, eim = 0.0;
      if (c > 0) ere += wr[i - 2], eim += wr[i - 1];
      if (c + 1 < n) ere += wr[i + 2], eim += wr[i + 3];
      o[i] = re + cx * nre + cy * ere;
      o[i + 1] = im + cx * nim + cy * eim;
    }
  }
}

Eigen::VectorXcd StepSystem::interior_of(const ComplexField& u) const {
  require_same_grid(u, rhs_);
  const int m = grid_.J - 1, n = grid_.K - 1;
  Eigen::VectorXcd v(unknowns());
  Eigen::Map<FieldArray<Complex>>(v.data(), m, n) = u.values.block(1, 1, m, n);
  return v;
}

Eigen::VectorXcd StepSystem::rhs_interior() const { return interior_of(rhs_); }

ComplexField StepSystem::field_from_interior(const Eigen::VectorXcd& v) const {
  const int m = grid_.J - 1, n = grid_.K - 1;
  ComplexField u(grid_);
  u.values.block(1, 1, m, n) = Eigen::Map<const FieldArray<Complex>>(v.data(), m, n);
  return u;
}

ComplexField StepSystem::apply(const ComplexField& w) const {
  const Eigen::VectorXcd x = interior_of(w);
  Eigen::VectorXcd y(unknowns());
  apply_interior(x.data(), y.data());
  return field_from_interior(y);
}

Eigen::MatrixXcd StepSystem::dense() const {
  if (grid_.J > 64 || grid_.K > 64) throw std::invalid_argument("StepSystem::dense: grid too large");
  const int m = grid_.J - 1, n = grid_.K - 1;
  const double cx = 0.5 / (grid_.dx * grid_.dx), cy = 0.5 / (grid_.dy * grid_.dy);
  const Eigen::Index size = unknowns();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(size, size);
  auto idx = [n](int r, int c) { return static_cast<Eigen::Index>(r) * n + c; };
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) {
      const Eigen::Index row = idx(r, c);
      A(row, row) = center_(r, c);
      if (r > 0) A(row, idx(r - 1, c)) = cx;
      if (r + 1 < m) A(row, idx(r + 1, c)) = cx;
      if (c > 0) A(row, idx(r, c - 1)) = cy;
      if (c + 1 < n) A(row, idx(r, c + 1)) = cy;
    }
  return A;
}

StepSystem build_step_system(const ComplexField& cur, const ComplexField& iterate,
                             const CnfdRunConfig& cfg, const ComplexField* source) {
  require_same_grid(cur, iterate);
  if (!cur.grid.same_nodes(cfg.grid)) throw std::invalid_argument("build_step_system: grid mismatch");
  if (source) require_same_grid(*source, cur);
  const Grid2D& g = cfg.grid;
  const PhysicsParams& p = cfg.params;
  const Complex I(0.0, 1.0);

  const FieldArray<double> rho_l = iterate.values.abs2();
  const FieldArray<double> rho_n = cur.values.abs2();
  const FieldArray<double> q =
      rho_l.binaryExpr(rho_n, [](double a, double b) { return kernel::diff_quotient_F(a, b); });
  const FieldArray<double> m2 = (0.5 * (iterate.values + cur.values)).abs2();
  FieldArray<Complex> coeff = (p.lambda * q).cast<Complex>() + I * (p.epsilon * m2).cast<Complex>();

  ComplexField rhs = laplacian_5pt(cur);
  rhs.values = (I / g.tau) * cur.values - 0.5 * rhs.values - 0.5 * coeff * cur.values;
  if (source) rhs.values += source->values;
  rhs.zero_boundary();
  return StepSystem(g, g.tau, std::move(coeff), std::move(rhs));
}

// ---------------------------------------------------------------------------

LinearSolve solve_linear(const StepSystem& sys, double tol, int max_iters, const ComplexField* guess) {
  const Eigen::VectorXcd b = sys.rhs_interior();
  LinearSolve out;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.solution = ComplexField(sys.grid());
    return out;
  }
  detail::StepOperator op(sys);
  Eigen::BiCGSTAB<detail::StepOperator, Eigen::IdentityPreconditioner> solver;
  solver.compute(op);
  solver.setTolerance(tol);

  Eigen::VectorXcd x = guess ? sys.interior_of(*guess) : Eigen::VectorXcd::Zero(sys.unknowns());
  Eigen::VectorXcd r(sys.unknowns());
  int used = 0;
  double rel = 0.0;
  // The recursive residual inside BiCGSTAB can drift from the true one;
  // restart from the current iterate until the true residual meets tol.
  for (;;) {
    solver.setMaxIterations(std::max(1, max_iters - used));
    x = solver.solveWithGuess(b, x);
    used += static_cast<int>(solver.iterations());
    sys.apply_interior(x.data(), r.data());
    r -= b;
    rel = r.norm() / bnorm;
    if (!x.allFinite()) break;
    if (rel <= tol || used >= max_iters) break;
    if (solver.iterations() == 0) break;
  }
  if (!(rel <= tol)) {
    std::ostringstream msg;
    msg << "linear solve did not converge: relative residual " << rel << " after " << used
        << " iterations (tol " << tol << ")";
    throw SolverError(msg.str(), rel, used);
  }
  out.solution = sys.field_from_interior(x);
  out.iterations = used;
  out.residual = rel;
  return out;
}

ComplexField solve_linear_dense(const StepSystem& sys) {
  const Eigen::MatrixXcd A = sys.dense();
  const Eigen::VectorXcd x = A.partialPivLu().solve(sys.rhs_interior());
  return sys.field_from_interior(x);
}

// ---------------------------------------------------------------------------

namespace {

struct FixedPointOutcome {
  ComplexField next;
  int iterations = 0;
  double residual = 0.0;
  int lin_iters = 0;
};

FixedPointOutcome fixed_point(const ComplexField& cur, const CnfdRunConfig& cfg,
                              const ComplexField* source) {
  FixedPointOutcome out;
  ComplexField iterate = cur;
  const int lin_cap = cfg.linear_iteration_cap();
  for (int l = 1; l <= cfg.fp_max_iters; ++l) {
    const StepSystem sys = build_step_system(cur, iterate, cfg, source);
    LinearSolve ls = solve_linear(sys, cfg.lin_tol, lin_cap, &iterate);
    out.lin_iters += ls.iterations;
    const double incr = norm_2h(ComplexField(cur.grid, ls.solution.values - iterate.values));
    const double size = norm_2h(ls.solution);
    const double rel = size > 0.0 ? incr / size : incr;
    iterate = std::move(ls.solution);
    out.iterations = l;
    out.residual = rel;
    if (!iterate.all_finite()) break;
    if (rel <= cfg.fp_tol) {
      out.next = std::move(iterate);
      return out;
    }
  }
  std::ostringstream msg;
  msg << "fixed-point iteration did not converge: relative increment " << out.residual << " after "
      << out.iterations << " sweeps (tol " << cfg.fp_tol << ")";
  throw SolverError(msg.str(), out.residual, out.iterations);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

StepDiagnostics describe(const ComplexField& u, const CnfdRunConfig& cfg, int n) {
  StepDiagnostics d;
  d.n = n;
  d.t = cfg.grid.t(n);
  d.mass = norm_2h_squared(u);
  d.energy = energy_Eh(u, cfg.params);
  return d;
}

}  // namespace

StepResult cnfd_step(const ComplexField& cur, const CnfdRunConfig& cfg, int n) {
  if (!cur.grid.same_nodes(cfg.grid)) throw std::invalid_argument("cnfd_step: grid mismatch");
  const auto start = std::chrono::steady_clock::now();
  ComplexField source;
  if (cfg.source) {
    source = cfg.source(cfg.grid.t(n) + 0.5 * cfg.grid.tau);
    require_same_grid(source, cur);
  }
  FixedPointOutcome fp = fixed_point(cur, cfg, cfg.source ? &source : nullptr);
  StepDiagnostics diag = describe(fp.next, cfg, n + 1);
  StepResult out{std::move(fp.next), diag};
  out.diag.fp_iters = fp.iterations;
  out.diag.residual = fp.residual;
  out.diag.lin_iters = fp.lin_iters;
  out.diag.wall_ms = elapsed_ms(start);
  return out;
}

std::vector<int> snapshot_steps(const std::vector<double>& times, double tau, int steps) {
  std::vector<int> out;
  out.reserve(times.size());
  for (double t : times) {
    const double r = t / tau;
    const double n = std::round(r);
    if (!(t >= 0.0) || std::abs(r - n) > 1e-9 * std::max(1.0, r) || n > steps) {
      std::ostringstream msg;
      msg << "snapshot time " << t << " is not on the time lattice (tau = " << tau << ", "
          << steps << " steps)";
      throw std::invalid_argument(msg.str());
    }
    out.push_back(static_cast<int>(n));
  }
  return out;
}

Trajectory run_cnfd(const ComplexField& u0, const CnfdRunConfig& cfg, const StepObserver& observer) {
  return run_cnfd(u0, cfg, cfg.grid.N, observer);
}

Trajectory run_cnfd(const ComplexField& u0, const CnfdRunConfig& cfg, int steps,
                    const StepObserver& observer) {
  cfg.validate();
  if (!u0.grid.same_nodes(cfg.grid)) throw std::invalid_argument("run_cnfd: grid mismatch");
  if (!u0.in_dirichlet_space())
    throw std::invalid_argument("run_cnfd: initial field must vanish on the boundary and be finite");
  const std::vector<int> snap = snapshot_steps(cfg.snapshot_times, cfg.grid.tau, steps);

  Trajectory traj;
  auto record = [&](int n, const ComplexField& u) {
    for (std::size_t i = 0; i < snap.size(); ++i)
      if (snap[i] == n) {
        traj.snapshot_times.push_back(cfg.snapshot_times[i]);
        traj.snapshots.push_back(u);
      }
    if (observer) observer(n, cfg.grid.t(n), u);
  };

  ComplexField u = u0;
  traj.diagnostics.push_back(describe(u, cfg, 0));
  record(0, u);
  const double mass0 = traj.diagnostics.front().mass;
  for (int n = 0; n < steps; ++n) {
    StepResult step;
    try {
      step = cnfd_step(u, cfg, n);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "CNFD step " << n + 1 << " failed: " << e.what();
      throw RunAborted(msg.str(), std::move(traj));
    }
    const double prev_mass = traj.diagnostics.back().mass;
    if (step.diag.mass > prev_mass + 10.0 * cfg.fp_tol * mass0) {
      std::ostringstream msg;
      msg << std::setprecision(12) << "step " << step.diag.n << ": mass increased from " << prev_mass
          << " to " << step.diag.mass;
      traj.warnings.push_back(msg.str());
    }
    traj.diagnostics.push_back(step.diag);
    u = std::move(step.next);
    record(n + 1, u);
  }
  return traj;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& diags) {
  // Wall-clock times stay out so that reruns give identical files.
  os << "n,t,fp_iters,lin_iters,residual,mass,energy\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (const auto& d : diags)
    os << d.n << ',' << d.t << ',' << d.fp_iters << ',' << d.lin_iters << ',' << d.residual << ',' << d.mass
       << ',' << d.energy << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace satnls
