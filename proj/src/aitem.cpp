#include "satnls/aitem.hpp"

#include "satnls/fld_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace satnls {

void AitemConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("aitem.dt must be > 0");
  if (!(c > 0.0)) throw std::invalid_argument("aitem.c must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("aitem.tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("aitem.max_iters must be >= 1");
  if (!(target_power > 0.0)) throw std::invalid_argument("aitem.target_power must be > 0");
}

namespace {

using RealCell = FieldArray<double>;

double cell_inner(const RealCell& a, const RealCell& b, double area) {
  return area * detail::sum_rows<double>(static_cast<int>(a.rows()),
                                         [&](int j) { return (a.row(j) * b.row(j)).sum(); });
}

RealCell saturable_term(const RealCell& v, double coupling) {
  return coupling * v.cube() / (1.0 + v.square());
}

RealCell real_part_of(const PeriodicField& a) { return a.real(); }

RealCell cell_of(const RealField& v) { return v.values.topLeftCorner(v.grid.J, v.grid.K); }

RealField field_of(const RealCell& cell, const Grid2D& g) {
  RealField out(g);
  out.values.topLeftCorner(g.J, g.K) = cell;
  return out;
}

struct Evaluation {
  RealCell lap;   // spectral Laplacian of v
  RealCell L0v;   // lap + nonlinear term
  double mu = 0.0;
  double residual = 0.0;
  RealCell Minv_L0v;
  RealCell Minv_v;
};

Evaluation evaluate(const RealCell& v, const AitemConfig& cfg, SpectralWorkspace& ws, double area) {
  Evaluation e;
  PeriodicField vhat = v.cast<Complex>();
  ws.forward(vhat);
  const FieldArray<double>& k2 = ws.k_squared();
  const RealCell precond = 1.0 / (cfg.c + k2);

  PeriodicField lap_hat = vhat * (-k2);
  PeriodicField tmp = lap_hat;
  ws.inverse(tmp);
  e.lap = real_part_of(tmp);
  e.L0v = e.lap + saturable_term(v, cfg.coupling);

  PeriodicField nl_hat = saturable_term(v, cfg.coupling).cast<Complex>();
  ws.forward(nl_hat);
  tmp = (lap_hat + nl_hat) * precond;
  ws.inverse(tmp);
  e.Minv_L0v = real_part_of(tmp);
  tmp = vhat * precond;
  ws.inverse(tmp);
  e.Minv_v = real_part_of(tmp);

  e.mu = cell_inner(e.Minv_L0v, v, area) / cell_inner(e.Minv_v, v, area);
  const RealCell res = e.L0v - e.mu * v;
  e.residual = std::sqrt(cell_inner(res, res, area) / cell_inner(v, v, area));
  return e;
}

void rescale(RealCell& v, double power, double area) {
  const double p = cell_inner(v, v, area);
  if (!(p > 0.0) || !std::isfinite(p)) throw std::domain_error("AITEM: iterate has zero or non-finite power");
  v *= std::sqrt(power / p);
}

}  // namespace

void normalize_power(RealField& v, double power) {
  const double p = norm_2h_squared(v);
  if (!(p > 0.0)) throw std::domain_error("normalize_power: zero field");
  v.values *= std::sqrt(power / p);
}

double ground_state_residual(const RealField& v, double mu, double coupling, SpectralWorkspace& ws) {
  if (!v.grid.same_nodes(ws.grid())) throw std::invalid_argument("ground_state_residual: grid mismatch");
  const RealCell cell = cell_of(v);
  const RealCell lap = real_part_of(ws.laplacian(cell.cast<Complex>()));
  const RealCell res = lap + saturable_term(cell, coupling) - mu * cell;
  const double area = v.grid.cell_area();
  return std::sqrt(cell_inner(res, res, area) / cell_inner(cell, cell, area));
}

AitemStep aitem_iterate(const RealField& v, const AitemConfig& cfg, SpectralWorkspace& ws) {
  if (!v.grid.same_nodes(ws.grid())) throw std::invalid_argument("aitem_iterate: grid mismatch");
  const double area = v.grid.cell_area();
  RealCell cell = cell_of(v);
  if ((cell == 0.0).all()) throw std::domain_error("aitem_iterate: zero iterate");
  const Evaluation e = evaluate(cell, cfg, ws, area);
  if (!std::isfinite(e.mu) || !std::isfinite(e.residual))
    throw std::domain_error("aitem_iterate: non-finite propagation constant or residual");
  cell += cfg.dt * (e.Minv_L0v - e.mu * e.Minv_v);
  if (!cell.allFinite()) throw std::domain_error("aitem_iterate: non-finite iterate");
  rescale(cell, cfg.target_power, area);
  return {field_of(cell, v.grid), e.mu, e.residual};
}

GroundState solve_ground_state(const RealField& initial_guess, const AitemConfig& cfg, SpectralWorkspace& ws) {
  cfg.validate();
  if (!initial_guess.grid.same_nodes(ws.grid()))
    throw std::invalid_argument("solve_ground_state: grid mismatch");
  const Grid2D& g = initial_guess.grid;
  const double area = g.cell_area();
  RealCell cell = cell_of(initial_guess);
  if ((cell == 0.0).all()) throw std::domain_error("solve_ground_state: zero initial guess");
  rescale(cell, cfg.target_power, area);

  GroundState gs;
  int rises = 0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Evaluation e = evaluate(cell, cfg, ws, area);
    if (!std::isfinite(e.mu) || !std::isfinite(e.residual))
      throw AitemError("AITEM diverged: non-finite residual", std::move(gs.residual_history));
    if (!gs.residual_history.empty() && it > 50 && e.residual > gs.residual_history.back())
      ++rises;
    gs.residual_history.push_back(e.residual);
    if (e.residual <= cfg.tol) {
      gs.mu = e.mu;
      gs.residual = e.residual;
      gs.iterations = it;
      break;
    }
    cell += cfg.dt * (e.Minv_L0v - e.mu * e.Minv_v);
    rescale(cell, cfg.target_power, area);
  }
  if (!(gs.residual_history.back() <= cfg.tol)) {
    std::ostringstream msg;
    msg << "AITEM did not converge in " << cfg.max_iters << " iterations; residual "
        << gs.residual_history.back();
    throw AitemError(msg.str(), std::move(gs.residual_history));
  }
  if (rises > 0) {
    std::ostringstream msg;
    msg << "residual increased on " << rises << " iterations after the initial transient";
    gs.warnings.push_back(msg.str());
  }

  gs.v = field_of(cell, g);
  gs.v.zero_boundary();
  gs.power = norm_2h_squared(gs.v);
  gs.projection_residual = ground_state_residual(gs.v, gs.mu, cfg.coupling, ws);
  return gs;
}

RealField sech_squared_radius_seed(const Grid2D& grid, double x0, double y0) {
  return RealField::sample_all(grid, [&](double x, double y) {
    const double r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0);
    return 1.0 / std::cosh(r2);
  });
}

void write_ground_state(const std::filesystem::path& fld_path, const std::filesystem::path& sidecar_path,
                        const GroundState& gs, const AitemConfig& cfg) {
  write_fld(fld_path, to_complex(gs.v), 0.0);
  write_atomically(sidecar_path, [&](std::ostream& os) {
    const Grid2D& g = gs.v.grid;
    os << std::setprecision(17);
    os << "mu = " << gs.mu << '\n'
       << "power = " << gs.power << '\n'
       << "residual = " << gs.residual << '\n'
       << "projection_residual = " << gs.projection_residual << '\n'
       << "iterations = " << gs.iterations << '\n'
       << "grid = " << g.a << ' ' << g.b << ' ' << g.c << ' ' << g.d << ' ' << g.J << ' ' << g.K << '\n'
       << "aitem.dt = " << cfg.dt << '\n'
       << "aitem.c = " << cfg.c << '\n'
       << "aitem.tol = " << cfg.tol << '\n'
       << "aitem.max_iters = " << cfg.max_iters << '\n'
       << "aitem.target_power = " << cfg.target_power << '\n';
  });
}

}  // namespace satnls
