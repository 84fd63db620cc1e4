#pragma once

#include "satnls/aitem.hpp"
#include "satnls/grid.hpp"
#include "satnls/mms.hpp"
#include "satnls/saturable.hpp"
#include "satnls/soliton.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace satnls {

enum class Mode { GroundState, EvolveCnfd, EvolveSsfm, Compare, ConvergenceTable, MmsStudy };

std::string to_string(Mode m);
/// Throws ConfigError for unknown names.
Mode parse_mode(const std::string& name);

/// Raised for malformed or inconsistent configuration; the message starts with the key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct LadderRung {
  double h = 0.0;
  double tau = 0.0;
};

struct CnfdSettings {
  double fp_tol = 1e-8;
  int fp_max_iters = 50;
  double lin_tol = 1e-10;
  int lin_max_iters = 0;
};

struct MmsSettings {
  bool present = false;  // an [mms] block was given
  MmsCase mms;
  Box box{0.0, 1.0, 0.0, 1.0};
  std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64};
  double tau_ratio = 0.25;
  double t_final = 1.0;
};

struct OutputSettings {
  std::vector<double> snapshot_times{0, 1, 2, 3, 4, 5};
  int plot_stride = 4;
  ShiftMethod shift = ShiftMethod::Fourier;
  AmplitudeMethod amplitude = AmplitudeMethod::Power;
};

/// Everything a run needs. Defaults reproduce the reference soliton experiment.
struct ExperimentConfig {
  Mode mode = Mode::EvolveCnfd;
  Box domain{-40.0, 40.0, -40.0, 40.0};
  double h = 0.0625;
  double tau = 0.0078125;
  double t_final = 5.0;
  PhysicsParams physics{1.0, 0.01};
  SolitonParams soliton;
  AitemConfig aitem;
  CnfdSettings cnfd;
  std::vector<LadderRung> ladder{{0.25, 0.03125}, {0.125, 0.015625}, {0.0625, 0.0078125}, {0.03125, 0.00390625}};
  bool rates = true;
  OutputSettings output;
  MmsSettings mms;

  // Run controls; set from the command line rather than the file.
  std::filesystem::path out_dir = "out";
  double ladder_max_h = 0.0625;  // finest mesh size a ladder may reach
  int threads = 1;
  bool allow_large = false;

  std::string source_text;  // file contents, echoed into the manifest

  /// Rungs that survive the finest-h cap, coarse to fine.
  std::vector<LadderRung> active_ladder() const;
  void validate() const;
};

/// Mesh sizes finer than this count as large runs.
inline constexpr double kLargeRunH = 0.0625;

/// Command-line run controls folded into the config before validation.
struct RunControls {
  std::optional<Mode> mode;  // fills a missing `mode` key; must agree with a present one
  std::filesystem::path out_dir = "out";
  std::optional<double> ladder_max_h;
  int threads = 1;
  bool allow_large = false;
};

/// Parses the INI-style format, applies `controls` and validates.
ExperimentConfig parse_config(std::istream& in, const RunControls& controls = {});
ExperimentConfig load_config(const std::filesystem::path& path, const RunControls& controls = {});

/// Accepts plain decimals and powers of two written as 2^-k.
double parse_real(const std::string& key, const std::string& text);
std::vector<double> parse_real_list(const std::string& key, const std::string& text);

}  // namespace satnls
