#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace satnls {

using Complex = std::complex<double>;

struct Box {
  double a = 0.0, b = 1.0, c = 0.0, d = 1.0;
};

/// Uniform rectangular grid on [a,b]x[c,d] with (J+1)x(K+1) nodes plus a
/// uniform partition of [0,T] into N steps of length tau.
struct Grid2D {
  double a = 0.0, b = 1.0, c = 0.0, d = 1.0;
  int J = 2, K = 2;
  double dx = 0.5, dy = 0.5;
  double T = 1.0;
  int N = 2;
  double tau = 0.5;

  int nx() const { return J + 1; }
  int ny() const { return K + 1; }
  double x(int j) const { return a + j * dx; }
  double y(int k) const { return c + k * dy; }
  double t(int n) const { return n * tau; }
  double cell_area() const { return dx * dy; }
  double h() const { return dx > dy ? dx : dy; }
  Box box() const { return {a, b, c, d}; }

  // Spatial identity only; the time partition may differ.
  bool same_nodes(const Grid2D& o) const {
    return J == o.J && K == o.K && a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

Grid2D build_grid(const Box& box, int J, int K, double T, int N);

/// J = (b-a)/h, K = (d-c)/h and N = T/tau must all be integers (to 1e-9).
Grid2D build_grid_from_steps(const Box& box, double h, double T, double tau);

/// Same spatial nodes with a new time partition.
Grid2D with_time(const Grid2D& g, double T, int N);

template <typename Scalar>
using FieldArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A grid function sampled on every node, boundary included. values(j, k)
/// holds the sample at (x_j, y_k); storage is row-major with k fastest.
template <typename Scalar>
struct GridFunction {
  Grid2D grid;
  FieldArray<Scalar> values;

  GridFunction() = default;
  explicit GridFunction(const Grid2D& g)
      : grid(g), values(FieldArray<Scalar>::Zero(g.nx(), g.ny())) {}
  GridFunction(const Grid2D& g, FieldArray<Scalar> v) : grid(g), values(std::move(v)) {
    if (values.rows() != g.nx() || values.cols() != g.ny())
      throw std::invalid_argument("GridFunction: array shape does not match grid");
  }

  Scalar& operator()(int j, int k) { return values(j, k); }
  const Scalar& operator()(int j, int k) const { return values(j, k); }

  /// Samples fn(x, y) on interior nodes; boundary nodes are left at zero.
  template <typename Fn>
  static GridFunction sample(const Grid2D& g, Fn&& fn) {
    GridFunction out(g);
    for (int j = 1; j < g.J; ++j)
      for (int k = 1; k < g.K; ++k) out.values(j, k) = fn(g.x(j), g.y(k));
    return out;
  }

  /// Samples fn(x, y) on every node including the boundary.
  template <typename Fn>
  static GridFunction sample_all(const Grid2D& g, Fn&& fn) {
    GridFunction out(g);
    for (int j = 0; j <= g.J; ++j)
      for (int k = 0; k <= g.K; ++k) out.values(j, k) = fn(g.x(j), g.y(k));
    return out;
  }

  void zero_boundary() {
    values.row(0).setZero();
    values.row(grid.J).setZero();
    values.col(0).setZero();
    values.col(grid.K).setZero();
  }

  bool boundary_is_zero() const {
    return (values.row(0) == Scalar(0)).all() && (values.row(grid.J) == Scalar(0)).all() &&
           (values.col(0) == Scalar(0)).all() && (values.col(grid.K) == Scalar(0)).all();
  }

  bool all_finite() const { return values.allFinite(); }

  /// Membership in X_JK: homogeneous Dirichlet boundary and finite entries.
  bool in_dirichlet_space() const { return boundary_is_zero() && all_finite(); }
};

using ComplexField = GridFunction<Complex>;
using RealField = GridFunction<double>;

template <typename A, typename B>
void require_same_grid(const GridFunction<A>& u, const GridFunction<B>& v) {
  if (!u.grid.same_nodes(v.grid)) throw std::invalid_argument("grid mismatch between fields");
}

template <typename Scalar>
GridFunction<double> modulus(const GridFunction<Scalar>& u) {
  return GridFunction<double>(u.grid, u.values.abs());
}

template <typename Scalar>
ComplexField to_complex(const GridFunction<Scalar>& u) {
  return ComplexField(u.grid, u.values.template cast<Complex>());
}

// ---------------------------------------------------------------------------
// Deterministic summation. Every reduction below forms one partial per grid
// row (Eigen's fixed-order redux) and combines the partials with a pairwise
// tree, so results never depend on how rows are scheduled.

template <typename T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.size() <= 8) {
    T s = T(0);
    for (const T& x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace detail {

// Sums rowfn(j) for j = 0..rows-1 with the pairwise tree.
template <typename T, typename RowFn>
T sum_rows(int rows, RowFn&& rowfn) {
  std::vector<T> partial(static_cast<std::size_t>(rows));
  for (int j = 0; j < rows; ++j) partial[static_cast<std::size_t>(j)] = rowfn(j);
  return pairwise_sum(std::span<const T>(partial));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Finite-difference operators. Outputs are grid functions on the same grid;
// entries where a stencil is undefined are zero.

/// Five-point Laplacian on interior nodes, zero on the boundary.
template <typename Scalar>
GridFunction<Scalar> laplacian_5pt(const GridFunction<Scalar>& u) {
  const Grid2D& g = u.grid;
  const int m = g.J - 1, n = g.K - 1;
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
  GridFunction<Scalar> out(g);
  const auto& v = u.values;
  out.values.block(1, 1, m, n) =
      (v.block(2, 1, m, n) - 2.0 * v.block(1, 1, m, n) + v.block(0, 1, m, n)) * ix2 +
      (v.block(1, 2, m, n) - 2.0 * v.block(1, 1, m, n) + v.block(1, 0, m, n)) * iy2;
  return out;
}

/// (delta_x^+ u, delta_y^+ u). The x part is defined for j <= J-1 and the y
/// part for k <= K-1; row J (resp. column K) is zero.
template <typename Scalar>
std::pair<GridFunction<Scalar>, GridFunction<Scalar>> forward_diff(const GridFunction<Scalar>& u) {
  const Grid2D& g = u.grid;
  GridFunction<Scalar> ux(g), uy(g);
  ux.values.topRows(g.J) = (u.values.bottomRows(g.J) - u.values.topRows(g.J)) / g.dx;
  uy.values.leftCols(g.K) = (u.values.rightCols(g.K) - u.values.leftCols(g.K)) / g.dy;
  return {std::move(ux), std::move(uy)};
}

/// (delta_x^- u, delta_y^- u), defined for j >= 1 (resp. k >= 1).
template <typename Scalar>
std::pair<GridFunction<Scalar>, GridFunction<Scalar>> backward_diff(const GridFunction<Scalar>& u) {
  const Grid2D& g = u.grid;
  GridFunction<Scalar> ux(g), uy(g);
  ux.values.bottomRows(g.J) = (u.values.bottomRows(g.J) - u.values.topRows(g.J)) / g.dx;
  uy.values.rightCols(g.K) = (u.values.rightCols(g.K) - u.values.leftCols(g.K)) / g.dy;
  return {std::move(ux), std::move(uy)};
}

/// (delta_x u, delta_y u) centred quotients, defined on interior rows/columns.
template <typename Scalar>
std::pair<GridFunction<Scalar>, GridFunction<Scalar>> centered_diff(const GridFunction<Scalar>& u) {
  const Grid2D& g = u.grid;
  GridFunction<Scalar> ux(g), uy(g);
  const int m = g.J - 1, n = g.K - 1;
  ux.values.middleRows(1, m) = (u.values.bottomRows(m) - u.values.topRows(m)) / (2.0 * g.dx);
  uy.values.middleCols(1, n) = (u.values.rightCols(n) - u.values.leftCols(n)) / (2.0 * g.dy);
  return {std::move(ux), std::move(uy)};
}

/// Forward time quotient (v - u) / tau.
template <typename Scalar>
GridFunction<Scalar> forward_time_diff(const GridFunction<Scalar>& next,
                                       const GridFunction<Scalar>& cur, double tau) {
  require_same_grid(next, cur);
  return GridFunction<Scalar>(cur.grid, (next.values - cur.values) / tau);
}

/// Centred time quotient (u^{n+1} - u^{n-1}) / (2 tau).
template <typename Scalar>
GridFunction<Scalar> centered_time_diff(const GridFunction<Scalar>& next,
                                        const GridFunction<Scalar>& prev, double tau) {
  require_same_grid(next, prev);
  return GridFunction<Scalar>(prev.grid, (next.values - prev.values) / (2.0 * tau));
}

// ---------------------------------------------------------------------------
// Inner products and norms. Unless stated otherwise the sums run over
// j = 0..J-1, k = 0..K-1 and carry the cell area dx*dy.

/// (u, v)_h = dx dy sum u conj(v).
template <typename Scalar>
Scalar inner_h(const GridFunction<Scalar>& u, const GridFunction<Scalar>& v) {
  require_same_grid(u, v);
  const Grid2D& g = u.grid;
  const Scalar s = detail::sum_rows<Scalar>(g.J, [&](int j) -> Scalar {
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
      return (u.values.row(j).head(g.K) * v.values.row(j).head(g.K).conjugate()).sum();
    else
      return (u.values.row(j).head(g.K) * v.values.row(j).head(g.K)).sum();
  });
  return g.cell_area() * s;
}

/// <u, v>_h over interior nodes only. Agrees with inner_h on X_JK.
template <typename Scalar>
Scalar inner_interior(const GridFunction<Scalar>& u, const GridFunction<Scalar>& v) {
  require_same_grid(u, v);
  const Grid2D& g = u.grid;
  const int n = g.K - 1;
  const Scalar s = detail::sum_rows<Scalar>(g.J - 1, [&](int r) -> Scalar {
    const int j = r + 1;
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
      return (u.values.row(j).segment(1, n) * v.values.row(j).segment(1, n).conjugate()).sum();
    else
      return (u.values.row(j).segment(1, n) * v.values.row(j).segment(1, n)).sum();
  });
  return g.cell_area() * s;
}

template <typename Scalar>
double norm_2h_squared(const GridFunction<Scalar>& u) {
  const Grid2D& g = u.grid;
  return g.cell_area() *
         detail::sum_rows<double>(g.J, [&](int j) { return u.values.row(j).head(g.K).abs2().sum(); });
}

template <typename Scalar>
double norm_2h(const GridFunction<Scalar>& u) {
  return std::sqrt(norm_2h_squared(u));
}

/// |||u|||_{2,h}, the interior-only norm.
template <typename Scalar>
double norm_2h_interior(const GridFunction<Scalar>& u) {
  return std::sqrt(std::abs(inner_interior(u, u)));
}

/// ||u||_{p,h} for p >= 1.
template <typename Scalar>
double norm_ph(const GridFunction<Scalar>& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm_ph: p must be >= 1");
  const Grid2D& g = u.grid;
  double s;
  if (p == 2.0) {
    return norm_2h(u);
  } else if (p == 4.0) {
    s = detail::sum_rows<double>(g.J, [&](int j) { return u.values.row(j).head(g.K).abs2().square().sum(); });
  } else if (p == 1.0) {
    s = detail::sum_rows<double>(g.J, [&](int j) { return u.values.row(j).head(g.K).abs().sum(); });
  } else {
    s = detail::sum_rows<double>(g.J, [&](int j) { return u.values.row(j).head(g.K).abs().pow(p).sum(); });
  }
  return std::pow(g.cell_area() * s, 1.0 / p);
}

/// sup over all nodes.
template <typename Scalar>
double norm_inf(const GridFunction<Scalar>& u) {
  return u.values.size() == 0 ? 0.0 : u.values.abs().maxCoeff();
}

/// |u|^2_{1,h} = ||delta_x^+ u||^2_{2,h} + ||delta_y^+ u||^2_{2,h}.
template <typename Scalar>
double seminorm_1h_squared(const GridFunction<Scalar>& u) {
  const Grid2D& g = u.grid;
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
  const auto& v = u.values;
  const double s = detail::sum_rows<double>(g.J, [&](int j) {
    const double sx = (v.row(j + 1).head(g.K) - v.row(j).head(g.K)).abs2().sum();
    const double sy = (v.row(j).segment(1, g.K) - v.row(j).head(g.K)).abs2().sum();
    return sx * ix2 + sy * iy2;
  });
  return g.cell_area() * s;
}

template <typename Scalar>
double seminorm_1h(const GridFunction<Scalar>& u) {
  return std::sqrt(seminorm_1h_squared(u));
}

}  // namespace satnls
