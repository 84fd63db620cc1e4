#pragma once

#include "satnls/aitem.hpp"
#include "satnls/cnfd.hpp"
#include "satnls/config.hpp"
#include "satnls/metrics.hpp"
#include "satnls/soliton.hpp"
#include "satnls/spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace satnls {

inline constexpr const char* kVersion = "0.1.0";

/// Ground state, launch field and amplitude law on one (h, tau) grid.
struct SolitonSetup {
  Grid2D grid;
  GroundState gs;
  ComplexField u0;
  AmplitudeLaw law;
  double aitem_s = 0.0;
};

/// Solves for the ground state centred at the launch point and builds u0.
SolitonSetup prepare_soliton(const ExperimentConfig& cfg, double h, double tau, SpectralWorkspace& ws);

struct AmplitudeSample {
  int n = 0;
  double t = 0.0;
  double a_th = 0.0;
  double a_power = 0.0;
  double a_peak = 0.0;
};

struct SchemeRun {
  std::string scheme;  // "cnfd" or "ssfm"
  std::vector<double> snapshot_times;
  std::vector<ComplexField> snapshots;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<AmplitudeSample> amplitude;  // every step
  std::vector<std::string> warnings;
  double max_boundary_tail = 0.0;  // spectral runs only
  double wall_s = 0.0;
};

/// Evolves setup.u0 to cfg.t_final with snapshots at `times`. RunAborted
/// escapes with the partial trajectory.
SchemeRun run_soliton_cnfd(const ExperimentConfig& cfg, const SolitonSetup& setup, const std::vector<double>& times);
SchemeRun run_soliton_ssfm(const ExperimentConfig& cfg, const SolitonSetup& setup, const std::vector<double>& times);

/// Amplitude of a field under the configured method.
double measured_amplitude(const ComplexField& u, const SolitonSetup& setup, const SolitonParams& p,
                          AmplitudeMethod method);

struct ProfileRow {
  double t = 0.0;
  double a_th = 0.0;
  double a_num = 0.0;
  double e_a = 0.0;
  double e_2h = 0.0;
  double e_1h = 0.0;
};

/// Amplitude and profile errors of one run against the moving-soliton model at its snapshot times.
std::vector<ProfileRow> profile_errors(const ExperimentConfig& cfg, const SolitonSetup& setup, const SchemeRun& run,
                                       SpectralWorkspace& ws);

struct CompareRow {
  double t = 0.0;
  double a_th = 0.0;
  double a_cnfd = 0.0, a_ssfm = 0.0;
  double ea_cnfd = 0.0, ea_ssfm = 0.0, d_a = 0.0;
  double e2_cnfd = 0.0, e2_ssfm = 0.0;
  double e1_cnfd = 0.0, e1_ssfm = 0.0;
  double d2 = 0.0, d1 = 0.0;
};

std::vector<CompareRow> compare_runs(const ExperimentConfig& cfg, const SolitonSetup& setup, const SchemeRun& cnfd,
                                     const SchemeRun& ssfm, SpectralWorkspace& ws);

/// Both schemes on one ladder rung; snapshot fields are dropped unless kept.
struct RungResult {
  LadderRung rung;
  double mu = 0.0;
  double aitem_residual = 0.0;
  std::vector<CompareRow> rows;
  SchemeRun cnfd, ssfm;
  double aitem_s = 0.0;
};

RungResult run_compare_rung(const ExperimentConfig& cfg, const LadderRung& rung, bool keep_fields = false);

/// Table-I metrics (E2h/E1h per scheme) and Table-II metrics (D2h/D1h) for t > 0.
void add_to_reports(const RungResult& r, ConvergenceReport& errors, ConvergenceReport& diffs);

// Writers. Every file goes through a temporary and a rename.
void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows);
void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfileRow>& rows);
void write_amplitude_csv(const std::filesystem::path& path, const std::vector<AmplitudeSample>& samples);
/// Blocks of "x y |u|" lines, one block per x, separated by blank lines.
void write_gnuplot_matrix(const std::filesystem::path& path, const RealField& modulus_field, int stride);

/// Dispatches on cfg.mode, writes artifacts under cfg.out_dir and returns the exit status.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace satnls
