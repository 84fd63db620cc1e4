#include "satnls/experiment.hpp"

#include "satnls/fld_io.hpp"
#include "satnls/mms.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace satnls {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string time_tag(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

std::string h_tag(double h) {
  std::ostringstream os;
  os << std::setprecision(10) << h;
  return os.str();
}

/// Key/value record written next to the outputs.
class Manifest {
 public:
  explicit Manifest(const ExperimentConfig& cfg) : cfg_(cfg) {
    set("satnls_version", kVersion);
    set("mode", to_string(cfg.mode));
    set("eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                     std::to_string(EIGEN_MINOR_VERSION));
    set("fft", fft_library_version());
    set("compiler", __VERSION__);
    set("threads", std::to_string(cfg.threads));
    set("allow_large", cfg.allow_large ? "true" : "false");
    set("ladder_max_h", h_tag(cfg.ladder_max_h));
    set("assumption.ssfm_steps", "SSFM uses the same (h, tau) as CNFD on every rung");
    set("assumption.amplitude", cfg.output.amplitude == AmplitudeMethod::Power
                                    ? "A_num = A0 sqrt(||u||^2 / ||u0||^2)"
                                    : "A_num = max|u| / max v");
    set("assumption.profile_shift", cfg.output.shift == ShiftMethod::Fourier ? "fourier" : "bilinear");
  }

  void set(const std::string& key, const std::string& value) {
    for (auto& kv : entries_)
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    entries_.emplace_back(key, value);
  }
  void set(const std::string& key, double value) {
    std::ostringstream os;
    os << std::setprecision(10) << value;
    set(key, os.str());
  }

  void write(const fs::path& path) const {
    write_atomically(path, [&](std::ostream& os) {
      for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
      os << "\n# config\n" << cfg_.source_text;
      if (!cfg_.source_text.empty() && cfg_.source_text.back() != '\n') os << '\n';
    });
  }

 private:
  const ExperimentConfig& cfg_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

template <typename Row, typename Fn>
void write_rows(const fs::path& path, const std::string& header, const std::vector<Row>& rows, Fn&& fields) {
  write_atomically(path, [&](std::ostream& os) {
    os << header << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
      const std::vector<double> v = fields(r);
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      os << '\n';
    }
  });
}

void write_diagnostics(const fs::path& path, const std::vector<StepDiagnostics>& diags) {
  write_atomically(path, [&](std::ostream& os) { write_diagnostics_csv(os, diags); });
}

std::vector<double> positive_times(const std::vector<double>& times) {
  std::vector<double> out;
  for (double t : times)
    if (t > 0.0) out.push_back(t);
  return out;
}

CnfdRunConfig cnfd_config(const ExperimentConfig& cfg, const Grid2D& g, const std::vector<double>& times) {
  CnfdRunConfig rc;
  rc.grid = g;
  rc.params = cfg.physics;
  rc.fp_tol = cfg.cnfd.fp_tol;
  rc.fp_max_iters = cfg.cnfd.fp_max_iters;
  rc.lin_tol = cfg.cnfd.lin_tol;
  rc.lin_max_iters = cfg.cnfd.lin_max_iters;
  rc.snapshot_times = times;
  return rc;
}

StepObserver amplitude_tracker(const SolitonSetup& setup, const SolitonParams& p, SchemeRun& run) {
  return [&setup, &p, &run](int n, double t, const ComplexField& u) {
    run.amplitude.push_back(
        {n, t, setup.law(t), measure_amplitude_power(u, setup.u0, p), measure_amplitude(u, setup.gs)});
  };
}

}  // namespace

// ---------------------------------------------------------------------------

SolitonSetup prepare_soliton(const ExperimentConfig& cfg, double h, double tau, SpectralWorkspace& ws) {
  const auto t0 = Clock::now();
  const Grid2D g = build_grid_from_steps(cfg.domain, h, cfg.t_final, tau);
  if (!g.same_nodes(ws.grid())) throw std::invalid_argument("prepare_soliton: workspace grid mismatch");
  AitemConfig a = cfg.aitem;
  a.coupling = cfg.physics.lambda;
  GroundState gs = solve_ground_state(sech_squared_radius_seed(g, cfg.soliton.x0, cfg.soliton.y0), a, ws);
  ComplexField u0 = build_initial_condition(gs, cfg.soliton);
  AmplitudeLaw law(u0, cfg.soliton, cfg.physics);
  return {g, std::move(gs), std::move(u0), law, seconds_since(t0)};
}

SchemeRun run_soliton_cnfd(const ExperimentConfig& cfg, const SolitonSetup& setup, const std::vector<double>& times) {
  const auto t0 = Clock::now();
  SchemeRun run;
  run.scheme = "cnfd";
  Trajectory tr = run_cnfd(setup.u0, cnfd_config(cfg, setup.grid, times), amplitude_tracker(setup, cfg.soliton, run));
  run.snapshot_times = std::move(tr.snapshot_times);
  run.snapshots = std::move(tr.snapshots);
  run.diagnostics = std::move(tr.diagnostics);
  run.warnings = std::move(tr.warnings);
  run.wall_s = seconds_since(t0);
  return run;
}

SchemeRun run_soliton_ssfm(const ExperimentConfig& cfg, const SolitonSetup& setup, const std::vector<double>& times) {
  const auto t0 = Clock::now();
  SchemeRun run;
  run.scheme = "ssfm";
  const SsfmRunConfig rc{setup.grid, cfg.physics, times, {}};
  SsfmTrajectory tr = run_ssfm(setup.u0, rc, amplitude_tracker(setup, cfg.soliton, run));
  run.snapshot_times = std::move(tr.snapshot_times);
  run.snapshots = std::move(tr.snapshots);
  run.diagnostics = std::move(tr.diagnostics);
  run.warnings = std::move(tr.warnings);
  run.max_boundary_tail = tr.max_boundary_tail;
  run.wall_s = seconds_since(t0);
  return run;
}

double measured_amplitude(const ComplexField& u, const SolitonSetup& setup, const SolitonParams& p,
                          AmplitudeMethod method) {
  return method == AmplitudeMethod::Power ? measure_amplitude_power(u, setup.u0, p)
                                          : measure_amplitude(u, setup.gs);
}

std::vector<ProfileRow> profile_errors(const ExperimentConfig& cfg, const SolitonSetup& setup, const SchemeRun& run,
                                       SpectralWorkspace& ws) {
  std::vector<ProfileRow> rows;
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const double t = run.snapshot_times[i];
    const ComplexField& u = run.snapshots[i];
    const RealField th =
        theoretical_profile_modulus(setup.gs, cfg.soliton, cfg.physics, t, cfg.output.shift, &ws);
    ProfileRow r;
    r.t = t;
    r.a_th = setup.law(t);
    r.a_num = measured_amplitude(u, setup, cfg.soliton, cfg.output.amplitude);
    r.e_a = rel_amp_error(r.a_num, r.a_th);
    r.e_2h = rel_profile_error_2h(u, th);
    r.e_1h = rel_profile_error_1h(u, th);
    rows.push_back(r);
  }
  return rows;
}

std::vector<CompareRow> compare_runs(const ExperimentConfig& cfg, const SolitonSetup& setup, const SchemeRun& cnfd,
                                     const SchemeRun& ssfm, SpectralWorkspace& ws) {
  if (cnfd.snapshot_times != ssfm.snapshot_times)
    throw std::invalid_argument("compare_runs: the runs have different snapshot times");
  const auto pc = profile_errors(cfg, setup, cnfd, ws);
  const auto ps = profile_errors(cfg, setup, ssfm, ws);
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    CompareRow r;
    r.t = pc[i].t;
    r.a_th = pc[i].a_th;
    r.a_cnfd = pc[i].a_num;
    r.a_ssfm = ps[i].a_num;
    r.ea_cnfd = pc[i].e_a;
    r.ea_ssfm = ps[i].e_a;
    r.d_a = rel_amp_diff(r.a_cnfd, r.a_ssfm);
    r.e2_cnfd = pc[i].e_2h;
    r.e2_ssfm = ps[i].e_2h;
    r.e1_cnfd = pc[i].e_1h;
    r.e1_ssfm = ps[i].e_1h;
    const ProfileDiff d = rel_profile_diff(cnfd.snapshots[i], ssfm.snapshots[i]);
    r.d2 = d.d2h;
    r.d1 = d.d1h;
    rows.push_back(r);
  }
  return rows;
}

RungResult run_compare_rung(const ExperimentConfig& cfg, const LadderRung& rung, bool keep_fields) {
  const Grid2D g = build_grid_from_steps(cfg.domain, rung.h, cfg.t_final, rung.tau);
  snapshot_steps(cfg.output.snapshot_times, g.tau, g.N);
  SpectralWorkspace ws(g);
  const SolitonSetup setup = prepare_soliton(cfg, rung.h, rung.tau, ws);
  RungResult r;
  r.rung = rung;
  r.mu = setup.gs.mu;
  r.aitem_residual = setup.gs.residual;
  r.aitem_s = setup.aitem_s;
  r.ssfm = run_soliton_ssfm(cfg, setup, cfg.output.snapshot_times);
  r.cnfd = run_soliton_cnfd(cfg, setup, cfg.output.snapshot_times);
  r.rows = compare_runs(cfg, setup, r.cnfd, r.ssfm, ws);
  if (!keep_fields) {
    r.cnfd.snapshots.clear();
    r.ssfm.snapshots.clear();
  }
  return r;
}

void add_to_reports(const RungResult& r, ConvergenceReport& errors, ConvergenceReport& diffs) {
  const double h = r.rung.h, tau = r.rung.tau;
  for (const auto& row : r.rows) {
    if (!(row.t > 0.0)) continue;
    errors.add("E2h_CNFD", row.t, h, tau, row.e2_cnfd);
    errors.add("E2h_SSFM", row.t, h, tau, row.e2_ssfm);
    errors.add("E1h_CNFD", row.t, h, tau, row.e1_cnfd);
    errors.add("E1h_SSFM", row.t, h, tau, row.e1_ssfm);
    errors.add("EA_CNFD", row.t, h, tau, row.ea_cnfd);
    errors.add("EA_SSFM", row.t, h, tau, row.ea_ssfm);
    errors.add("DA", row.t, h, tau, row.d_a);
    diffs.add("D2h", row.t, h, tau, row.d2);
    diffs.add("D1h", row.t, h, tau, row.d1);
  }
}

// ---------------------------------------------------------------------------

void write_compare_csv(const fs::path& path, const std::vector<CompareRow>& rows) {
  write_rows(path, "t,A_th,A_cnfd,A_ssfm,EA_cnfd,EA_ssfm,D_A,E2h_cnfd,E2h_ssfm,E1h_cnfd,E1h_ssfm,D2h,D1h", rows,
             [](const CompareRow& r) {
               return std::vector<double>{r.t,       r.a_th,    r.a_cnfd,  r.a_ssfm,  r.ea_cnfd, r.ea_ssfm, r.d_a,
                                          r.e2_cnfd, r.e2_ssfm, r.e1_cnfd, r.e1_ssfm, r.d2,      r.d1};
             });
}

void write_profile_csv(const fs::path& path, const std::vector<ProfileRow>& rows) {
  write_rows(path, "t,A_th,A_num,E_A,E2h,E1h", rows, [](const ProfileRow& r) {
    return std::vector<double>{r.t, r.a_th, r.a_num, r.e_a, r.e_2h, r.e_1h};
  });
}

void write_amplitude_csv(const fs::path& path, const std::vector<AmplitudeSample>& samples) {
  write_rows(path, "n,t,A_th,A_power,A_peak,EA_power,EA_peak", samples, [](const AmplitudeSample& s) {
    return std::vector<double>{static_cast<double>(s.n), s.t, s.a_th, s.a_power, s.a_peak,
                               rel_amp_error(s.a_power, s.a_th), rel_amp_error(s.a_peak, s.a_th)};
  });
}

void write_gnuplot_matrix(const fs::path& path, const RealField& f, int stride) {
  if (stride < 1) throw std::invalid_argument("write_gnuplot_matrix: stride must be >= 1");
  const Grid2D& g = f.grid;
  auto indices = [stride](int last) {
    std::vector<int> idx;
    for (int i = 0; i <= last; i += stride) idx.push_back(i);
    if (idx.back() != last) idx.push_back(last);
    return idx;
  };
  const auto js = indices(g.J), ks = indices(g.K);
  write_atomically(path, [&](std::ostream& os) {
    os << "# x y |u|\n" << std::setprecision(10);
    for (int j : js) {
      for (int k : ks) os << g.x(j) << ' ' << g.y(k) << ' ' << f(j, k) << '\n';
      os << '\n';
    }
  });
}

// ---------------------------------------------------------------------------

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::ostream& log;
  Manifest& manifest;
  fs::path dir;
};

void log_line(Context& cx, const std::string& s) { cx.log << s << std::endl; }

void emit_snapshots(Context& cx, const SchemeRun& run) {
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const std::string stem = run.scheme + "_t" + time_tag(run.snapshot_times[i]);
    write_fld(cx.dir / (stem + ".fld"), run.snapshots[i], run.snapshot_times[i]);
    write_gnuplot_matrix(cx.dir / (stem + ".dat"), modulus(run.snapshots[i]), cx.cfg.output.plot_stride);
  }
}

/// Runs one scheme; on failure the partial diagnostics and snapshots are written before rethrowing.
SchemeRun evolve(Context& cx, const SolitonSetup& setup, bool cnfd) {
  const std::string scheme = cnfd ? "cnfd" : "ssfm";
  try {
    SchemeRun run = cnfd ? run_soliton_cnfd(cx.cfg, setup, cx.cfg.output.snapshot_times)
                         : run_soliton_ssfm(cx.cfg, setup, cx.cfg.output.snapshot_times);
    cx.manifest.set("timing." + scheme + "_s", run.wall_s);
    for (const auto& w : run.warnings) log_line(cx, "warning (" + scheme + "): " + w);
    return run;
  } catch (const RunAborted& e) {
    const Trajectory& p = e.partial();
    write_diagnostics(cx.dir / (scheme + "_diagnostics.csv"), p.diagnostics);
    for (std::size_t i = 0; i < p.snapshots.size(); ++i)
      write_fld(cx.dir / (scheme + "_t" + time_tag(p.snapshot_times[i]) + ".fld"), p.snapshots[i],
                p.snapshot_times[i]);
    throw;
  }
}

void report_scheme(Context& cx, const SchemeRun& run, const std::vector<ProfileRow>& rows) {
  emit_snapshots(cx, run);
  write_diagnostics(cx.dir / (run.scheme + "_diagnostics.csv"), run.diagnostics);
  write_amplitude_csv(cx.dir / (run.scheme + "_amplitude.csv"), run.amplitude);
  write_profile_csv(cx.dir / (run.scheme + "_profile.csv"), rows);
  std::ostringstream os;
  os << std::setprecision(5);
  for (const auto& r : rows)
    os << run.scheme << " t=" << r.t << " A_num=" << r.a_num << " A_th=" << r.a_th << " E_A=" << r.e_a
       << " E2h=" << r.e_2h << " E1h=" << r.e_1h << '\n';
  cx.log << os.str() << std::flush;
}

SolitonSetup setup_for(Context& cx, SpectralWorkspace& ws) {
  SolitonSetup s = prepare_soliton(cx.cfg, cx.cfg.h, cx.cfg.tau, ws);
  cx.manifest.set("mu", s.gs.mu);
  cx.manifest.set("aitem.residual", s.gs.residual);
  cx.manifest.set("aitem.iterations", std::to_string(s.gs.iterations));
  cx.manifest.set("timing.aitem_s", s.aitem_s);
  for (const auto& w : s.gs.warnings) log_line(cx, "warning (aitem): " + w);
  return s;
}

Grid2D main_grid(const ExperimentConfig& cfg) {
  const Grid2D g = build_grid_from_steps(cfg.domain, cfg.h, cfg.t_final, cfg.tau);
  snapshot_steps(cfg.output.snapshot_times, g.tau, g.N);
  return g;
}

void mode_groundstate(Context& cx) {
  const Grid2D g = build_grid_from_steps(cx.cfg.domain, cx.cfg.h, cx.cfg.t_final, cx.cfg.tau);
  SpectralWorkspace ws(g);
  const SolitonSetup s = setup_for(cx, ws);
  AitemConfig a = cx.cfg.aitem;
  a.coupling = cx.cfg.physics.lambda;
  write_ground_state(cx.dir / "groundstate.fld", cx.dir / "groundstate.txt", s.gs, a);
  write_gnuplot_matrix(cx.dir / "groundstate.dat", s.gs.v, cx.cfg.output.plot_stride);
  write_atomically(cx.dir / "groundstate_residuals.csv", [&](std::ostream& os) {
    os << "iteration,residual\n" << std::setprecision(17);
    for (std::size_t i = 0; i < s.gs.residual_history.size(); ++i) os << i << ',' << s.gs.residual_history[i] << '\n';
  });
  std::ostringstream os;
  os << std::setprecision(10) << "mu = " << s.gs.mu << "  P = " << s.gs.power << "  residual = " << s.gs.residual
     << "  iterations = " << s.gs.iterations;
  log_line(cx, os.str());
}

void mode_evolve(Context& cx, bool cnfd) {
  const Grid2D g = main_grid(cx.cfg);
  SpectralWorkspace ws(g);
  const SolitonSetup s = setup_for(cx, ws);
  const SchemeRun run = evolve(cx, s, cnfd);
  report_scheme(cx, run, profile_errors(cx.cfg, s, run, ws));
}

void mode_compare(Context& cx) {
  const Grid2D g = main_grid(cx.cfg);
  SpectralWorkspace ws(g);
  const SolitonSetup s = setup_for(cx, ws);
  const SchemeRun ssfm = evolve(cx, s, false);
  const SchemeRun cnfd = evolve(cx, s, true);
  report_scheme(cx, ssfm, profile_errors(cx.cfg, s, ssfm, ws));
  report_scheme(cx, cnfd, profile_errors(cx.cfg, s, cnfd, ws));
  const auto rows = compare_runs(cx.cfg, s, cnfd, ssfm, ws);
  write_compare_csv(cx.dir / "compare.csv", rows);
  std::ostringstream os;
  os << std::setprecision(5);
  for (const auto& r : rows) os << "t=" << r.t << " D_A=" << r.d_a << " D2h=" << r.d2 << " D1h=" << r.d1 << '\n';
  cx.log << os.str() << std::flush;
}

std::string render_table(const ConvergenceReport& rep, const std::vector<std::string>& metrics,
                         const std::vector<double>& times, const std::vector<LadderRung>& ladder, bool with_rates) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "t" << std::setw(10) << "metric";
  for (const auto& r : ladder) os << std::setw(13) << ("h=" + h_tag(r.h));
  os << '\n';
  for (double t : times)
    for (const auto& m : metrics) {
      os << std::setw(6) << t << std::setw(10) << m;
      for (const auto& r : ladder) {
        std::ostringstream cell;
        if (auto v = rep.value(m, t, r.h)) cell << std::scientific << std::setprecision(4) << *v;
        os << std::setw(13) << cell.str();
      }
      os << '\n';
      if (with_rates) {
        os << std::setw(6) << "" << std::setw(10) << "rate";
        for (const auto& r : ladder) {
          std::ostringstream cell;
          if (auto q = rep.rate(m, t, r.h)) cell << std::fixed << std::setprecision(4) << *q;
          os << std::setw(13) << cell.str();
        }
        os << '\n';
      }
    }
  return os.str();
}

void mode_convergence(Context& cx, int& status) {
  const auto ladder = cx.cfg.active_ladder();
  const auto times = positive_times(cx.cfg.output.snapshot_times);
  for (const auto& rung : ladder) {
    const Grid2D g = build_grid_from_steps(cx.cfg.domain, rung.h, cx.cfg.t_final, rung.tau);
    snapshot_steps(cx.cfg.output.snapshot_times, g.tau, g.N);
  }
  ConvergenceReport errors, diffs;
  for (const auto& rung : ladder) {
    log_line(cx, "rung h=" + h_tag(rung.h) + " tau=" + h_tag(rung.tau));
    const RungResult r = run_compare_rung(cx.cfg, rung);
    const fs::path rd = cx.dir / ("rung_h" + h_tag(rung.h));
    fs::create_directories(rd);
    write_compare_csv(rd / "compare.csv", r.rows);
    write_diagnostics(rd / "cnfd_diagnostics.csv", r.cnfd.diagnostics);
    write_diagnostics(rd / "ssfm_diagnostics.csv", r.ssfm.diagnostics);
    write_amplitude_csv(rd / "cnfd_amplitude.csv", r.cnfd.amplitude);
    write_amplitude_csv(rd / "ssfm_amplitude.csv", r.ssfm.amplitude);
    add_to_reports(r, errors, diffs);
    const std::string key = "rung_h" + h_tag(rung.h);
    cx.manifest.set(key + ".mu", r.mu);
    cx.manifest.set(key + ".timing.aitem_s", r.aitem_s);
    cx.manifest.set(key + ".timing.cnfd_s", r.cnfd.wall_s);
    cx.manifest.set(key + ".timing.ssfm_s", r.ssfm.wall_s);
    for (const auto& w : r.cnfd.warnings) log_line(cx, "warning (cnfd): " + w);
  }
  write_atomically(cx.dir / "table1.csv", [&](std::ostream& os) { errors.write_csv(os); });
  write_atomically(cx.dir / "table2.csv", [&](std::ostream& os) { diffs.write_csv(os); });

  const std::string t1 =
      render_table(errors, {"E2h_CNFD", "E2h_SSFM", "E1h_CNFD", "E1h_SSFM"}, times, ladder, false);
  const std::string t2 = render_table(diffs, {"D2h", "D1h"}, times, ladder, cx.cfg.rates);
  write_atomically(cx.dir / "tables.txt", [&](std::ostream& os) { os << t1 << '\n' << t2; });
  cx.log << t1 << '\n' << t2 << std::flush;

  // Every requested cell must be present.
  std::vector<std::string> missing;
  for (double t : times)
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      for (const char* m : {"E2h_CNFD", "E2h_SSFM", "E1h_CNFD", "E1h_SSFM"})
        if (!errors.value(m, t, ladder[i].h)) missing.push_back(std::string(m) + "@t=" + time_tag(t));
      for (const char* m : {"D2h", "D1h"}) {
        if (!diffs.value(m, t, ladder[i].h)) missing.push_back(std::string(m) + "@t=" + time_tag(t));
        if (cx.cfg.rates && i + 1 < ladder.size() && !diffs.rate(m, t, ladder[i].h))
          missing.push_back(std::string("rate ") + m + "@t=" + time_tag(t));
      }
    }
  if (!missing.empty()) {
    status = 1;
    log_line(cx, "error: missing table cells: " + missing.front() + " and " + std::to_string(missing.size() - 1) +
                     " more");
    cx.manifest.set("status", "failed");
    cx.manifest.set("error", "missing table cells");
  }
}

void mode_mms(Context& cx) {
  const MmsSettings& m = cx.cfg.mms;
  const MmsStudy s = run_mms_study(m.mms, m.box, cx.cfg.physics, m.hs, m.tau_ratio, m.t_final);
  write_atomically(cx.dir / "mms.csv", [&](std::ostream& os) {
    os << "h,tau,err_2h,err_1h,rate_2h,rate_1h\n" << std::setprecision(17);
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
      const MmsLevel& l = s.levels[i];
      os << l.h << ',' << l.tau << ',' << l.err_2h << ',' << l.err_1h << ',';
      if (i > 0) os << s.rate_2h[i - 1] << ',' << s.rate_1h[i - 1];
      else os << ',';
      os << '\n';
    }
  });
  std::ostringstream os;
  os << std::setprecision(5);
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    os << "h=" << s.levels[i].h << " err_2h=" << s.levels[i].err_2h << " err_1h=" << s.levels[i].err_1h;
    if (i > 0) os << " order_2h=" << s.rate_2h[i - 1] << " order_1h=" << s.rate_1h[i - 1];
    os << '\n';
    cx.manifest.set("timing.mms_h" + h_tag(s.levels[i].h) + "_s", s.levels[i].wall_s);
  }
  cx.log << os.str() << std::flush;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto t0 = Clock::now();
  fs::create_directories(cfg.out_dir);
  Manifest manifest(cfg);
  manifest.set("status", "ok");
  set_fft_threads(cfg.threads);
  Context cx{cfg, log, manifest, cfg.out_dir};
  int status = 0;
  try {
    switch (cfg.mode) {
      case Mode::GroundState: mode_groundstate(cx); break;
      case Mode::EvolveCnfd: mode_evolve(cx, true); break;
      case Mode::EvolveSsfm: mode_evolve(cx, false); break;
      case Mode::Compare: mode_compare(cx); break;
      case Mode::ConvergenceTable: mode_convergence(cx, status); break;
      case Mode::MmsStudy: mode_mms(cx); break;
    }
  } catch (const std::exception& e) {
    status = 1;
    manifest.set("status", "failed");
    manifest.set("error", e.what());
    log << "error: " << e.what() << std::endl;
  }
  manifest.set("timing.total_s", seconds_since(t0));
  manifest.write(cfg.out_dir / "manifest.txt");
  return status;
}

}  // namespace satnls
