// Acceptance driver: prints one PASS/FAIL line per criterion and writes the
// numbers behind each verdict to <out>/acceptance.txt.
//
//   acceptance [--only 1,3,8] [--expect-fail 4] [--out DIR] [--ladder-max-h H]
//
// Exit status is 0 when the failing set equals the expected-fail set.

#include "oracles.hpp"

#include "satnls/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

using namespace satnls;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string summary;
  std::string detail;
};

// Reference values the ladder is checked against, keyed by (t, h).
using Cell = std::pair<int, double>;
const std::map<Cell, double> kD2h = {
    {{1, 0.25}, 8.6271e-3}, {{1, 0.125}, 2.1669e-3}, {{1, 0.0625}, 5.4218e-4},
    {{2, 0.25}, 1.7503e-2}, {{2, 0.125}, 4.3863e-3}, {{2, 0.0625}, 1.0963e-3},
    {{3, 0.25}, 2.6596e-2}, {{3, 0.125}, 6.6441e-3}, {{3, 0.0625}, 1.6588e-3},
    {{4, 0.25}, 3.5779e-2}, {{4, 0.125}, 8.9094e-3}, {{4, 0.0625}, 2.2220e-3},
    {{5, 0.25}, 4.4951e-2}, {{5, 0.125}, 1.1160e-2}, {{5, 0.0625}, 2.7810e-3},
};

std::string sci(double v, int digits = 4) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class Driver {
 public:
  Driver(fs::path out, double ladder_max_h) : out_(std::move(out)), ladder_max_h_(ladder_max_h) {
    fs::create_directories(out_);
  }

  Verdict mass_law() {
    Verdict v;
    const RungResult* r = rung(0.125);
    if (!r) return missing("h = 2^-3 rung");
    const auto& d = r->cnfd.diagnostics;
    const double m0 = d.front().mass;
    double worst = -1e300;
    for (std::size_t n = 1; n < d.size(); ++n) worst = std::max(worst, (d[n].mass - d[n - 1].mass) / m0);
    const auto& c = lossless();
    double drift = 0.0;
    for (const auto& s : c.diagnostics) drift = std::max(drift, std::abs(s.mass - c.diagnostics.front().mass));
    drift /= c.diagnostics.front().mass;
    v.pass = worst <= 1e-6 && drift <= 1e-7;
    v.summary = "max step mass increase " + sci(worst, 2) + " (<= 1e-6 of M0), lossless drift " + sci(drift, 2) +
                " (<= 1e-7)";
    v.detail = "eps=0.01 steps: " + std::to_string(d.size() - 1) + ", final mass ratio " +
               sci(d.back().mass / m0, 8) + "; eps=0 steps: " + std::to_string(c.diagnostics.size() - 1);
    return v;
  }

  Verdict energy() {
    Verdict v;
    const auto& c = lossless();
    const double e0 = c.diagnostics.front().energy;
    double worst_t2 = 0.0, worst_all = 0.0;
    for (const auto& s : c.diagnostics) {
      const double dev = std::abs(s.energy - e0) / (1.0 + std::abs(e0));
      worst_all = std::max(worst_all, dev);
      if (s.t <= 2.0 + 1e-12) worst_t2 = std::max(worst_t2, dev);
    }
    v.pass = worst_t2 <= 1e-5;
    v.summary = "max |E_n - E_0|/(1+|E_0|) up to t=2: " + sci(worst_t2, 2) + " (<= 1e-5)";
    v.detail = "E_0 = " + sci(e0, 10) + ", worst over the whole run to t=5: " + sci(worst_all, 2);
    return v;
  }

  Verdict mms_order() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const MmsStudy s = run_mms_study(mms_catalog("gauss-sine"), {0, 1, 0, 1}, {1.0, 0.01},
                                     {1.0 / 16, 1.0 / 32, 1.0 / 64}, 0.25, 1.0);
    bool ok = true;
    std::ostringstream rates;
    for (std::size_t i = 0; i < s.rate_2h.size(); ++i) {
      ok = ok && s.rate_2h[i] >= 1.8 && s.rate_2h[i] <= 2.2 && s.rate_1h[i] >= 1.8 && s.rate_1h[i] <= 2.2;
      rates << (i ? ", " : "") << std::fixed << std::setprecision(3) << s.rate_2h[i] << "/" << s.rate_1h[i];
    }
    std::ostringstream errs;
    for (const auto& l : s.levels) errs << " h=" << l.h << ": " << sci(l.err_2h, 3) << "/" << sci(l.err_1h, 3);
    v.pass = ok;
    v.summary = "orders (2h/1h) " + rates.str() + " in [1.8, 2.2]";
    v.detail = "errors" + errs.str() + "; " + std::to_string(seconds_since(t0)) + " s";
    return v;
  }

  Verdict ground_state() {
    Verdict v;
    const RungResult* r = rung(0.0625);
    if (!r) return missing("h = 2^-4 rung");
    const double target = 0.1692;
    v.pass = std::abs(r->mu - target) <= 0.002 && r->aitem_residual <= 1e-9;
    v.summary = "mu = " + fixed(r->mu, 7) + " (want 0.1692 +- 0.002), residual " + sci(r->aitem_residual, 2) +
                " (<= 1e-9)";
    // Independent check of the eigenvalue: in two dimensions a ground state obeys
    // mu ||v||^2 = sum F(v^2), so the same mu follows without any Laplacian.
    v.detail = "Pohozaev estimate of mu from the stored profile: " + fixed(pohozaev_mu_, 7);
    return v;
  }

  Verdict amplitude() {
    Verdict v;
    const RungResult* r = rung(0.0625);
    if (!r) return missing("h = 2^-4 rung");
    double ec = 0, es = 0, da = 0;
    for (const auto& row : r->rows) {
      if (!(row.t >= 1.0)) continue;
      ec = std::max(ec, row.ea_cnfd);
      es = std::max(es, row.ea_ssfm);
      da = std::max(da, row.d_a);
    }
    v.pass = ec <= 5e-4 && es <= 5e-4 && da <= 5e-5;
    v.summary = "max E_A CNFD " + sci(ec, 3) + ", SSFM " + sci(es, 3) + " (<= 5e-4); D_A " + sci(da, 3) +
                " (<= 5e-5)";
    if (const RungResult* c = rung(0.125)) {
      double rc = 0, rs = 0;
      for (const auto& row : c->rows)
        if (row.t >= 1.0) {
          rc = std::max(rc, row.ea_cnfd);
          rs = std::max(rs, row.ea_ssfm);
        }
      v.detail = "reduced rung h=2^-3: E_A CNFD " + sci(rc, 3) + ", SSFM " + sci(rs, 3) + " (<= 2e-3: " +
                 (rc <= 2e-3 && rs <= 2e-3 ? "ok" : "exceeded") + ")";
    }
    return v;
  }

  Verdict table2() {
    Verdict v;
    for (double h : {0.25, 0.125, 0.0625})
      if (!rung(h)) return missing("ladder rung h = " + fixed(h, 4));
    bool ok = true;
    double lo = 1e9, hi = -1e9, worst_rel = 0;
    std::ostringstream detail;
    for (int t = 1; t <= 5; ++t) {
      for (const char* m : {"D2h", "D1h"})
        for (double h : {0.25, 0.125}) {
          const auto q = diffs_.rate(m, t, h);
          if (!q) {
            ok = false;
            continue;
          }
          lo = std::min(lo, *q);
          hi = std::max(hi, *q);
          ok = ok && std::abs(*q - 2.0) <= 0.06;
        }
      for (double h : {0.25, 0.125, 0.0625}) {
        const double got = *diffs_.value("D2h", t, h), ref = kD2h.at({t, h});
        const double rel = std::abs(got - ref) / ref;
        worst_rel = std::max(worst_rel, rel);
        ok = ok && rel <= 0.10;
        detail << " t=" << t << ",h=" << h << ":" << sci(got, 4);
      }
    }
    v.pass = ok;
    v.summary = "rates in [" + fixed(lo, 4) + ", " + fixed(hi, 4) + "] (2 +- 0.06), worst D2h deviation " +
                fixed(100 * worst_rel, 2) + "% (<= 10%)";
    v.detail = "D2h" + detail.str();
    return v;
  }

  Verdict table1() {
    Verdict v;
    const RungResult* a = rung(0.125);
    const RungResult* b = rung(0.0625);
    if (!a || !b) return missing("h = 2^-3 and 2^-4 rungs");
    const double e_c = row_at(*a, 1.0).e2_cnfd, e_s = row_at(*b, 3.0).e2_ssfm;
    const double rc = std::abs(e_c - 3.3323e-3) / 3.3323e-3, rs = std::abs(e_s - 7.8574e-3) / 7.8574e-3;
    v.pass = rc <= 0.15 && rs <= 0.15;
    v.summary = "E2h CNFD(t=1,h=2^-3) " + sci(e_c) + " (" + fixed(100 * rc, 2) + "% off 3.3323e-3), E2h SSFM(t=3,h=2^-4) " +
                sci(e_s) + " (" + fixed(100 * rs, 2) + "% off 7.8574e-3)";
    return v;
  }

  Verdict oracles() {
    Verdict v;
    const double q = oracle::quotient_vs_quadrature(500, 42);
    const double o = oracle::nonlinear_flow_vs_ode(500, 77);
    const double s = oracle::summation_by_parts_defect(40, 20261016);
    const double a = oracle::assembly_vs_dense(12, 101);
    v.pass = q <= 1e-12 && o <= 1e-10 && s <= 1e-12 && a <= 1e-13;
    v.summary = "quotient " + sci(q, 2) + " (<= 1e-12), flow " + sci(o, 2) + " (<= 1e-10), SBP " + sci(s, 2) +
                " (<= 1e-12), assembly " + sci(a, 2) + " (<= 1e-13)";
    return v;
  }

  void write_tables() {
    if (ladder_.empty()) return;
    std::ofstream(out_ / "table1.csv") << [&] {
      std::ostringstream os;
      errors_.write_csv(os);
      return os.str();
    }();
    std::ofstream(out_ / "table2.csv") << [&] {
      std::ostringstream os;
      diffs_.write_csv(os);
      return os.str();
    }();
  }

 private:
  static Verdict missing(const std::string& what) { return {false, "not run: " + what + " is beyond --ladder-max-h", ""}; }

  static std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
  }

  static const CompareRow& row_at(const RungResult& r, double t) {
    for (const auto& row : r.rows)
      if (std::abs(row.t - t) < 1e-12) return row;
    throw std::runtime_error("no compare row at t = " + std::to_string(t));
  }

  ExperimentConfig reference_config() const {
    std::istringstream empty;
    RunControls rc;
    rc.mode = Mode::Compare;
    rc.out_dir = out_;
    return parse_config(empty, rc);
  }

  const RungResult* rung(double h) {
    if (h < ladder_max_h_ * (1 - 1e-12)) return nullptr;
    if (!ladder_.count(h)) {
      const auto t0 = std::chrono::steady_clock::now();
      std::cerr << "[acceptance] running ladder rung h=" << h << std::endl;
      ExperimentConfig cfg = reference_config();
      const LadderRung lr{h, h / 8};
      RungResult r = run_compare_rung(cfg, lr, h == 0.0625);
      if (h == 0.0625) {
        // Profile-only eigenvalue estimate for the ground-state verdict.
        SpectralWorkspace ws(build_grid_from_steps(cfg.domain, h, cfg.t_final, h / 8));
        const SolitonSetup s = prepare_soliton(cfg, h, h / 8, ws);
        double pot = 0, pw = 0;
        for (int j = 0; j < s.gs.v.grid.J; ++j)
          for (int k = 0; k < s.gs.v.grid.K; ++k) {
            const double q = s.gs.v(j, k) * s.gs.v(j, k);
            pot += F_potential(q);
            pw += q;
          }
        pohozaev_mu_ = pot / pw;
        r.cnfd.snapshots.clear();
        r.ssfm.snapshots.clear();
      }
      add_to_reports(r, errors_, diffs_);
      std::cerr << "[acceptance] rung h=" << h << " done in " << seconds_since(t0) << " s" << std::endl;
      ladder_.emplace(h, std::move(r));
    }
    return &ladder_.at(h);
  }

  const SchemeRun& lossless() {
    if (!lossless_) {
      const auto t0 = std::chrono::steady_clock::now();
      std::cerr << "[acceptance] running lossless CNFD at h=2^-3" << std::endl;
      ExperimentConfig cfg = reference_config();
      cfg.physics.epsilon = 0.0;
      SpectralWorkspace ws(build_grid_from_steps(cfg.domain, 0.125, cfg.t_final, 1.0 / 64));
      const SolitonSetup s = prepare_soliton(cfg, 0.125, 1.0 / 64, ws);
      lossless_ = run_soliton_cnfd(cfg, s, {});
      std::cerr << "[acceptance] lossless run done in " << seconds_since(t0) << " s" << std::endl;
    }
    return *lossless_;
  }

  fs::path out_;
  double ladder_max_h_;
  std::map<double, RungResult> ladder_;
  std::optional<SchemeRun> lossless_;
  ConvergenceReport errors_, diffs_;
  double pohozaev_mu_ = 0.0;
};

std::set<int> parse_set(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const int n = std::stoi(item);
    if (n < 1 || n > 8) throw std::invalid_argument("criterion numbers run from 1 to 8");
    out.insert(n);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the saturable NLS solvers"};
  std::string only = "1,2,3,4,5,6,7,8", expect_fail;
  std::string out = "acceptance_out";
  double ladder_max_h = 0.0625;
  app.add_option("--only", only, "Comma-separated criteria to run");
  app.add_option("--expect-fail", expect_fail, "Comma-separated criteria known to fail");
  app.add_option("--out", out, "Directory for acceptance.txt and tables");
  app.add_option("--ladder-max-h", ladder_max_h, "Finest ladder mesh size")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::set<int> run, expected;
  try {
    run = parse_set(only);
    expected = parse_set(expect_fail);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 2;
  }

  Driver d(out, ladder_max_h);
  const std::map<int, std::pair<const char*, std::function<Verdict()>>> criteria = {
      {1, {"mass law", [&] { return d.mass_law(); }}},
      {2, {"lossless energy", [&] { return d.energy(); }}},
      {3, {"manufactured order", [&] { return d.mms_order(); }}},
      {4, {"ground state", [&] { return d.ground_state(); }}},
      {5, {"amplitude law", [&] { return d.amplitude(); }}},
      {6, {"difference rates", [&] { return d.table2(); }}},
      {7, {"profile spot checks", [&] { return d.table1(); }}},
      {8, {"oracle suites", [&] { return d.oracles(); }}},
  };
  // Cheap checks first; the ladder rungs are built on first use and shared.
  const int order[] = {8, 3, 1, 2, 7, 6, 5, 4};

  std::ofstream report(fs::path(out) / "acceptance.txt");
  std::map<int, bool> passed;
  for (int n : order) {
    if (!run.count(n)) continue;
    const auto& [name, fn] = criteria.at(n);
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what(), ""};
    }
    passed[n] = v.pass;
    std::ostringstream line;
    line << "criterion " << n << " (" << name << "): " << (v.pass ? "PASS" : "FAIL") << "  " << v.summary;
    if (!v.pass && expected.count(n)) line << "  [expected]";
    std::cout << line.str() << std::endl;
    report << line.str() << '\n';
    if (!v.detail.empty()) report << "    " << v.detail << '\n';
    report.flush();
  }
  d.write_tables();

  int status = 0;
  for (const auto& [n, ok] : passed) {
    if (!ok && !expected.count(n)) status = 1;
    if (ok && expected.count(n)) {
      std::cout << "criterion " << n << " passed but was listed in --expect-fail\n";
      status = 1;
    }
  }
  return status;
}
