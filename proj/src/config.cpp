#include "satnls/config.hpp"

#include <algorithm>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace satnls {

namespace pt = boost::property_tree;

namespace {

const std::map<Mode, std::string>& mode_names() {
  static const std::map<Mode, std::string> names{{Mode::GroundState, "groundstate"},
                                                 {Mode::EvolveCnfd, "evolve-cnfd"},
                                                 {Mode::EvolveSsfm, "evolve-ssfm"},
                                                 {Mode::Compare, "compare"},
                                                 {Mode::ConvergenceTable, "convergence-table"},
                                                 {Mode::MmsStudy, "mms-study"}};
  return names;
}

// Section -> accepted keys. The empty section holds top-level keys.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"mode"}},
      {"domain", {"a", "b", "c", "d"}},
      {"grid", {"h", "tau", "t_final"}},
      {"physics", {"lambda", "epsilon"}},
      {"soliton", {"A0", "x0", "y0", "d1", "d2", "alpha0"}},
      {"aitem", {"dt", "c", "tol", "max_iters", "power"}},
      {"cnfd", {"fp_tol", "fp_max_iters", "lin_tol", "lin_max_iters"}},
      {"ladder", {"h", "tau", "tau_ratio", "rates"}},
      {"output", {"snapshot_times", "plot_stride", "shift", "amplitude"}},
      {"mms", {"case", "amp", "sigma", "omega", "beta", "nu", "mx", "my", "a", "b", "c", "d", "h", "tau_ratio",
               "t_final"}},
  };
  return s;
}

bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has_section(const std::string& section) const { return tree_.get_child_optional(section).has_value(); }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    if (section.empty()) {
      auto v = tree_.get_child_optional(pt::ptree::path_type(key, '\0'));
      if (v && v->empty()) return v->data();
      return std::nullopt;
    }
    auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    auto v = sec->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return v->data();
  }

  void real(const std::string& section, const std::string& key, double& out) const {
    if (auto s = raw(section, key)) out = parse_real(path(section, key), *s);
  }

  void integer(const std::string& section, const std::string& key, int& out) const {
    if (auto s = raw(section, key)) {
      const double v = parse_real(path(section, key), *s);
      if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError(path(section, key), "expected an integer");
      out = static_cast<int>(v);
    }
  }

  void boolean(const std::string& section, const std::string& key, bool& out) const {
    if (auto s = raw(section, key)) {
      if (*s == "true" || *s == "1" || *s == "yes") out = true;
      else if (*s == "false" || *s == "0" || *s == "no") out = false;
      else throw ConfigError(path(section, key), "expected true or false, got '" + *s + "'");
    }
  }

  void list(const std::string& section, const std::string& key, std::vector<double>& out) const {
    if (auto s = raw(section, key)) out = parse_real_list(path(section, key), *s);
  }

  static std::string path(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  const auto& s = schema();
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (!s.at("").count(name)) throw ConfigError(name, "unknown key");
      continue;
    }
    auto sec = s.find(name);
    if (sec == s.end() || name.empty()) throw ConfigError(name, "unknown section");
    for (const auto& [key, child] : node) {
      if (!sec->second.count(key)) throw ConfigError(name + "." + key, "unknown key");
      if (!child.empty()) throw ConfigError(name + "." + key, "nested keys are not supported");
    }
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_string(Mode m) { return mode_names().at(m); }

Mode parse_mode(const std::string& name) {
  for (const auto& [m, n] : mode_names())
    if (n == name) return m;
  throw ConfigError("mode", "unknown mode '" + name + "'");
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError(key, "empty value");
  const auto caret = s.find('^');
  double value;
  std::size_t used = 0;
  try {
    if (caret != std::string::npos) {
      const double base = std::stod(s.substr(0, caret), &used);
      if (used != caret) throw std::invalid_argument("base");
      const std::string ex = s.substr(caret + 1);
      const double expo = std::stod(ex, &used);
      if (used != ex.size()) throw std::invalid_argument("exponent");
      value = std::pow(base, expo);
    } else {
      value = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument("trailing");
    }
  } catch (const std::exception&) {
    throw ConfigError(key, "cannot parse '" + s + "' as a number");
  }
  if (!std::isfinite(value)) throw ConfigError(key, "value must be finite");
  return value;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::string token;
  std::istringstream in(spaced);
  while (in >> token) out.push_back(parse_real(key, token));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<LadderRung> ExperimentConfig::active_ladder() const {
  std::vector<LadderRung> out;
  for (const auto& r : ladder)
    if (r.h >= ladder_max_h * (1.0 - 1e-12)) out.push_back(r);
  return out;
}

void ExperimentConfig::validate() const {
  if (!(domain.b > domain.a) || !(domain.d > domain.c)) throw ConfigError("domain", "need b > a and d > c");
  if (!(h > 0.0)) throw ConfigError("grid.h", "must be > 0");
  if (!(tau > 0.0)) throw ConfigError("grid.tau", "must be > 0");
  if (!(t_final > 0.0)) throw ConfigError("grid.t_final", "must be > 0");
  try {
    physics.validate();
  } catch (const std::exception& e) {
    throw ConfigError("physics", e.what());
  }
  try {
    soliton.validate();
  } catch (const std::exception& e) {
    throw ConfigError("soliton", e.what());
  }
  try {
    aitem.validate();
  } catch (const std::exception& e) {
    throw ConfigError("aitem", e.what());
  }
  if (!(cnfd.fp_tol > 0.0)) throw ConfigError("cnfd.fp_tol", "must be > 0");
  if (cnfd.fp_max_iters < 1) throw ConfigError("cnfd.fp_max_iters", "must be >= 1");
  if (!(cnfd.lin_tol > 0.0) || cnfd.lin_tol > cnfd.fp_tol / 10)
    throw ConfigError("cnfd.lin_tol", "must be positive and at most fp_tol / 10");
  if (cnfd.lin_max_iters < 0) throw ConfigError("cnfd.lin_max_iters", "must be >= 0");
  if (output.plot_stride < 1) throw ConfigError("output.plot_stride", "must be >= 1");
  for (double t : output.snapshot_times)
    if (!(t >= 0.0) || t > t_final * (1 + 1e-12))
      throw ConfigError("output.snapshot_times", "times must lie in [0, t_final]");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (!(ladder_max_h > 0.0)) throw ConfigError("ladder-max-h", "must be > 0");

  const bool large_grid = h < kLargeRunH * (1.0 - 1e-12);
  const bool uses_grid = mode == Mode::GroundState || mode == Mode::EvolveCnfd || mode == Mode::EvolveSsfm ||
                         mode == Mode::Compare;
  if (uses_grid && large_grid && !allow_large)
    throw ConfigError("grid.h", "mesh sizes below 2^-4 need --allow-large");

  if (mode == Mode::ConvergenceTable) {
    if (ladder.empty()) throw ConfigError("ladder", "empty ladder");
    if (ladder_max_h < kLargeRunH * (1.0 - 1e-12) && !allow_large)
      throw ConfigError("ladder-max-h", "ladders finer than 2^-4 need --allow-large");
    const auto active = active_ladder();
    if (active.empty()) throw ConfigError("ladder.h", "no rung is at or above the finest-h cap");
    for (const auto& r : active)
      if (!(r.h > 0.0) || !(r.tau > 0.0)) throw ConfigError("ladder", "h and tau must be > 0");
    if (rates) {
      for (std::size_t i = 1; i < active.size(); ++i) {
        if (!close(active[i].h, 0.5 * active[i - 1].h))
          throw ConfigError("ladder.h", "rates need h to halve between rungs");
        if (!close(active[i].tau / active[i].h, active[0].tau / active[0].h))
          throw ConfigError("ladder.tau", "rates need tau proportional to h");
      }
    }
  }
  if (mode == Mode::MmsStudy) {
    if (!mms.present) throw ConfigError("mms", "mms-study needs an [mms] block naming the case");
    try {
      mms.mms.validate();
    } catch (const std::exception& e) {
      throw ConfigError("mms.case", e.what());
    }
    if (mms.hs.size() < 2) throw ConfigError("mms.h", "need at least two mesh sizes");
    for (double v : mms.hs)
      if (!(v > 0.0)) throw ConfigError("mms.h", "mesh sizes must be > 0");
    if (!(mms.tau_ratio > 0.0)) throw ConfigError("mms.tau_ratio", "must be > 0");
    if (!(mms.t_final > 0.0)) throw ConfigError("mms.t_final", "must be > 0");
    if (!(mms.box.b > mms.box.a) || !(mms.box.d > mms.box.c)) throw ConfigError("mms", "need b > a and d > c");
  }
}

ExperimentConfig parse_config(std::istream& in, const RunControls& controls) {
  const std::optional<Mode>& cli_mode = controls.mode;
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg;
  cfg.source_text = text.str();

  pt::ptree tree;
  try {
    std::istringstream again(cfg.source_text);
    pt::ini_parser::read_ini(again, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  check_keys(tree);
  const Reader r(tree);

  if (auto m = r.raw("", "mode")) {
    cfg.mode = parse_mode(trim(*m));
    if (cli_mode && *cli_mode != cfg.mode)
      throw ConfigError("mode", "file says '" + trim(*m) + "' but the command line asks for '" +
                                    to_string(*cli_mode) + "'");
  } else if (cli_mode) {
    cfg.mode = *cli_mode;
  }

  r.real("domain", "a", cfg.domain.a);
  r.real("domain", "b", cfg.domain.b);
  r.real("domain", "c", cfg.domain.c);
  r.real("domain", "d", cfg.domain.d);
  r.real("grid", "h", cfg.h);
  r.real("grid", "tau", cfg.tau);
  r.real("grid", "t_final", cfg.t_final);
  r.real("physics", "lambda", cfg.physics.lambda);
  r.real("physics", "epsilon", cfg.physics.epsilon);
  r.real("soliton", "A0", cfg.soliton.A0);
  r.real("soliton", "x0", cfg.soliton.x0);
  r.real("soliton", "y0", cfg.soliton.y0);
  r.real("soliton", "d1", cfg.soliton.d1);
  r.real("soliton", "d2", cfg.soliton.d2);
  r.real("soliton", "alpha0", cfg.soliton.alpha0);
  r.real("aitem", "dt", cfg.aitem.dt);
  r.real("aitem", "c", cfg.aitem.c);
  r.real("aitem", "tol", cfg.aitem.tol);
  r.integer("aitem", "max_iters", cfg.aitem.max_iters);
  r.real("aitem", "power", cfg.aitem.target_power);
  cfg.aitem.coupling = cfg.physics.lambda;
  r.real("cnfd", "fp_tol", cfg.cnfd.fp_tol);
  r.integer("cnfd", "fp_max_iters", cfg.cnfd.fp_max_iters);
  r.real("cnfd", "lin_tol", cfg.cnfd.lin_tol);
  r.integer("cnfd", "lin_max_iters", cfg.cnfd.lin_max_iters);

  if (r.raw("ladder", "h")) {
    std::vector<double> hs, taus;
    r.list("ladder", "h", hs);
    r.list("ladder", "tau", taus);
    double ratio = 0.0;
    r.real("ladder", "tau_ratio", ratio);
    if (!taus.empty() && ratio > 0.0) throw ConfigError("ladder.tau", "give either tau or tau_ratio, not both");
    if (taus.empty() && !(ratio > 0.0)) throw ConfigError("ladder.tau", "give tau or tau_ratio with ladder.h");
    if (!taus.empty() && taus.size() != hs.size())
      throw ConfigError("ladder.tau", "needs one entry per ladder.h entry");
    cfg.ladder.clear();
    for (std::size_t i = 0; i < hs.size(); ++i) cfg.ladder.push_back({hs[i], taus.empty() ? ratio * hs[i] : taus[i]});
  } else if (r.raw("ladder", "tau") || r.raw("ladder", "tau_ratio")) {
    throw ConfigError("ladder.h", "ladder.tau given without ladder.h");
  }
  r.boolean("ladder", "rates", cfg.rates);

  r.list("output", "snapshot_times", cfg.output.snapshot_times);
  r.integer("output", "plot_stride", cfg.output.plot_stride);
  if (auto s = r.raw("output", "shift")) {
    const std::string v = trim(*s);
    if (v == "fourier") cfg.output.shift = ShiftMethod::Fourier;
    else if (v == "bilinear") cfg.output.shift = ShiftMethod::Bilinear;
    else throw ConfigError("output.shift", "expected fourier or bilinear, got '" + v + "'");
  }
  if (auto s = r.raw("output", "amplitude")) {
    const std::string v = trim(*s);
    if (v == "power") cfg.output.amplitude = AmplitudeMethod::Power;
    else if (v == "peak") cfg.output.amplitude = AmplitudeMethod::Peak;
    else throw ConfigError("output.amplitude", "expected power or peak, got '" + v + "'");
  }

  if (r.has_section("mms")) {
    cfg.mms.present = true;
    const auto name = r.raw("mms", "case");
    if (!name) throw ConfigError("mms.case", "required");
    const std::string n = trim(*name);
    if (n != "gauss-sine" && n != "sine-mode") throw ConfigError("mms.case", "'" + n + "' is not in the catalog");
    cfg.mms.mms = mms_catalog(n);
    r.real("mms", "amp", cfg.mms.mms.amp);
    r.real("mms", "sigma", cfg.mms.mms.sigma);
    r.real("mms", "omega", cfg.mms.mms.omega);
    r.real("mms", "beta", cfg.mms.mms.beta);
    r.real("mms", "nu", cfg.mms.mms.nu);
    r.integer("mms", "mx", cfg.mms.mms.mx);
    r.integer("mms", "my", cfg.mms.mms.my);
    r.real("mms", "a", cfg.mms.box.a);
    r.real("mms", "b", cfg.mms.box.b);
    r.real("mms", "c", cfg.mms.box.c);
    r.real("mms", "d", cfg.mms.box.d);
    r.list("mms", "h", cfg.mms.hs);
    r.real("mms", "tau_ratio", cfg.mms.tau_ratio);
    r.real("mms", "t_final", cfg.mms.t_final);
  }

  cfg.out_dir = controls.out_dir;
  if (controls.ladder_max_h) {
    cfg.ladder_max_h = *controls.ladder_max_h;
  } else if (controls.allow_large) {
    for (const auto& rung : cfg.ladder) cfg.ladder_max_h = std::min(cfg.ladder_max_h, rung.h);
  }
  cfg.threads = controls.threads;
  cfg.allow_large = controls.allow_large;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const RunControls& controls) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in, controls);
}

}  // namespace satnls
