#pragma once

#include "satnls/grid.hpp"

#include <algorithm>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace satnls {

/// |Anum - Ath| / Ath.
double rel_amp_error(double Anum, double Ath);
/// |Acnfd - Assfm| / Assfm.
double rel_amp_diff(double Acnfd, double Assfm);

/// Modulus field with the boundary ring cleared, as used by the 1h seminorm
/// comparisons. `tail` (optional) receives the largest discarded value.
template <typename Scalar>
RealField interior_modulus(const GridFunction<Scalar>& u, double* tail = nullptr) {
  RealField m = modulus(u);
  if (tail) {
    const auto& v = m.values;
    const Eigen::Index r = v.rows() - 1, c = v.cols() - 1;
    *tail = std::max({v.row(0).maxCoeff(), v.row(r).maxCoeff(), v.col(0).maxCoeff(), v.col(c).maxCoeff()});
  }
  m.zero_boundary();
  return m;
}

namespace detail {
void require_positive_norm(double n, const char* what);
}

/// || |u_num| - u_ref ||_{2,h} / ||u_ref||_{2,h}.
template <typename A, typename B>
double rel_profile_error_2h(const GridFunction<A>& u_num, const GridFunction<B>& u_ref) {
  require_same_grid(u_num, u_ref);
  const RealField ref = modulus(u_ref);
  const double denom = norm_2h(ref);
  detail::require_positive_norm(denom, "rel_profile_error_2h");
  const RealField diff(ref.grid, modulus(u_num).values - ref.values);
  return norm_2h(diff) / denom;
}

/// | |u_num| - u_ref |_{1,h} / |u_ref|_{1,h}; both moduli lose their boundary
/// values first.
template <typename A, typename B>
double rel_profile_error_1h(const GridFunction<A>& u_num, const GridFunction<B>& u_ref) {
  require_same_grid(u_num, u_ref);
  const RealField ref = interior_modulus(u_ref);
  const double denom = seminorm_1h(ref);
  detail::require_positive_norm(denom, "rel_profile_error_1h");
  const RealField diff(ref.grid, interior_modulus(u_num).values - ref.values);
  return seminorm_1h(diff) / denom;
}

struct ProfileDiff {
  double d2h = 0.0;
  double d1h = 0.0;
};

/// Modulus differences of a CNFD field against an SSFM field, normalised by the SSFM field.
inline ProfileDiff rel_profile_diff(const ComplexField& u_cnfd, const ComplexField& u_ssfm) {
  return {rel_profile_error_2h(u_cnfd, u_ssfm), rel_profile_error_1h(u_cnfd, u_ssfm)};
}

/// log2(coarse / fine).
double observed_rate(double coarse, double fine);

struct ConvergenceRow {
  std::string metric;
  double t = 0.0;
  double h = 0.0;
  double tau = 0.0;
  double value = 0.0;
};

struct RateEntry {
  std::string metric;
  double t = 0.0;
  double h_coarse = 0.0;
  double h_fine = 0.0;
  double rate = 0.0;
};

/// Metric values over a refinement ladder. Rates pair each row with the row
/// of the same metric and time at h/2 whose tau/h ratio matches.
class ConvergenceReport {
 public:
  void add(std::string metric, double t, double h, double tau, double value);
  void add(const ConvergenceRow& row) { add(row.metric, row.t, row.h, row.tau, row.value); }

  const std::vector<ConvergenceRow>& rows() const { return rows_; }
  std::vector<RateEntry> rates() const;

  std::optional<double> value(const std::string& metric, double t, double h) const;
  std::optional<double> rate(const std::string& metric, double t, double h_coarse) const;

  /// Columns metric,t,h,tau,value,rate; rate is the one towards h/2, blank if none.
  void write_csv(std::ostream& os) const;

 private:
  const ConvergenceRow* find(const std::string& metric, double t, double h) const;
  std::vector<ConvergenceRow> rows_;
};

}  // namespace satnls
