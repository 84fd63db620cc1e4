#include "satnls/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace satnls {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

void require_denominator(double d, const char* what) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    std::ostringstream msg;
    msg << what << ": reference must be positive and finite, got " << d;
    throw std::domain_error(msg.str());
  }
}

}  // namespace

namespace detail {
void require_positive_norm(double n, const char* what) {
  if (!(n > 0.0)) throw std::domain_error(std::string(what) + ": reference field has zero norm");
}
}  // namespace detail

double rel_amp_error(double Anum, double Ath) {
  require_denominator(Ath, "rel_amp_error");
  return std::abs(Anum - Ath) / Ath;
}

double rel_amp_diff(double Acnfd, double Assfm) {
  require_denominator(Assfm, "rel_amp_diff");
  return std::abs(Acnfd - Assfm) / Assfm;
}

double observed_rate(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) {
    std::ostringstream msg;
    msg << "observed_rate: values must be positive, got " << coarse << " and " << fine;
    throw std::domain_error(msg.str());
  }
  return std::log2(coarse / fine);
}

// ---------------------------------------------------------------------------

void ConvergenceReport::add(std::string metric, double t, double h, double tau, double value) {
  if (!(h > 0.0) || !(tau > 0.0)) throw std::invalid_argument("ConvergenceReport: h and tau must be > 0");
  if (find(metric, t, h)) {
    std::ostringstream msg;
    msg << "ConvergenceReport: duplicate cell " << metric << " t=" << t << " h=" << h;
    throw std::invalid_argument(msg.str());
  }
  rows_.push_back({std::move(metric), t, h, tau, value});
}

const ConvergenceRow* ConvergenceReport::find(const std::string& metric, double t, double h) const {
  for (const auto& r : rows_)
    if (r.metric == metric && close(r.t, t) && close(r.h, h)) return &r;
  return nullptr;
}

std::optional<double> ConvergenceReport::value(const std::string& metric, double t, double h) const {
  const ConvergenceRow* r = find(metric, t, h);
  if (!r) return std::nullopt;
  return r->value;
}

std::optional<double> ConvergenceReport::rate(const std::string& metric, double t, double h_coarse) const {
  const ConvergenceRow* c = find(metric, t, h_coarse);
  if (!c) return std::nullopt;
  const ConvergenceRow* f = find(metric, t, 0.5 * h_coarse);
  if (!f || !close(c->tau / c->h, f->tau / f->h)) return std::nullopt;
  if (!(c->value > 0.0) || !(f->value > 0.0)) return std::nullopt;
  return observed_rate(c->value, f->value);
}

std::vector<RateEntry> ConvergenceReport::rates() const {
  std::vector<RateEntry> out;
  for (const auto& r : rows_)
    if (auto q = rate(r.metric, r.t, r.h)) out.push_back({r.metric, r.t, r.h, 0.5 * r.h, *q});
  return out;
}

void ConvergenceReport::write_csv(std::ostream& os) const {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << "metric,t,h,tau,value,rate\n" << std::setprecision(17);
  for (const auto& r : rows_) {
    os << r.metric << ',' << r.t << ',' << r.h << ',' << r.tau << ',' << r.value << ',';
    if (auto q = rate(r.metric, r.t, r.h)) os << *q;
    os << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace satnls
