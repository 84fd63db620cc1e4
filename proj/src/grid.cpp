#include "satnls/grid.hpp"

#include <cmath>
#include <sstream>

namespace satnls {

namespace {

int integral_ratio(double length, double step, const char* what) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw std::invalid_argument(std::string("build_grid: non-positive ") + what);
  const double r = length / step;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream msg;
    msg << "build_grid: " << what << " = " << step << " does not divide length " << length;
    throw std::invalid_argument(msg.str());
  }
  return static_cast<int>(n);
}

}  // namespace

Grid2D build_grid(const Box& box, int J, int K, double T, int N) {
  if (!(box.b > box.a) || !(box.d > box.c))
    throw std::invalid_argument("build_grid: degenerate bounds");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("build_grid: T must be positive");
  if (J < 2 || K < 2 || N < 2) throw std::invalid_argument("build_grid: J, K, N must be >= 2");
  Grid2D g;
  g.a = box.a;
  g.b = box.b;
  g.c = box.c;
  g.d = box.d;
  g.J = J;
  g.K = K;
  g.dx = (box.b - box.a) / J;
  g.dy = (box.d - box.c) / K;
  g.T = T;
  g.N = N;
  g.tau = T / N;
  return g;
}

Grid2D build_grid_from_steps(const Box& box, double h, double T, double tau) {
  if (!(box.b > box.a) || !(box.d > box.c))
    throw std::invalid_argument("build_grid: degenerate bounds");
  const int J = integral_ratio(box.b - box.a, h, "mesh size along x");
  const int K = integral_ratio(box.d - box.c, h, "mesh size along y");
  const int N = integral_ratio(T, tau, "time step");
  return build_grid(box, J, K, T, N);
}

Grid2D with_time(const Grid2D& g, double T, int N) {
  return build_grid(g.box(), g.J, g.K, T, N);
}

}  // namespace satnls
