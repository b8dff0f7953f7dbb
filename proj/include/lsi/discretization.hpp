#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lsi/potentials.hpp"

namespace lsi {

/// Node values of a function on the grid.
using GridFunction = Eigen::VectorXd;

/// Uniform tensor grid on [-R, R]^dim. Node index i = i_0 + N * i_1.
class Grid {
 public:
  Grid(int dim, double radius, int points_per_axis);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  int points_per_axis() const { return points_; }
  double spacing() const { return spacing_; }
  std::size_t size() const;

  double axis_coordinate(int k) const { return -radius_ + spacing_ * k; }
  /// Per-axis index of node i along `axis`.
  int axis_index(std::size_t i, int axis) const;
  double coordinate(std::size_t i, int axis) const { return axis_coordinate(axis_index(i, axis)); }
  Point node(std::size_t i) const;
  /// True when the node lies on the boundary of the box.
  bool is_boundary(std::size_t i) const;
  /// Squared distance of every node to x0.
  GridFunction squared_distances(const Point& x0) const;
  /// Node closest to the point x.
  std::size_t nearest_node(const Point& x) const;

 private:
  int dim_;
  double radius_;
  int points_;
  double spacing_;
};

/// Throws ConfigError when radius <= 0, points < 3 or the node count exceeds
/// node_budget.
Grid build_grid(int dim, double radius, int points,
                std::size_t node_budget = std::numeric_limits<std::size_t>::max());

/// Smallest radius on a 0.25 lattice for which e^{-V} on the boundary falls
/// below `tail` times its maximum. Throws ConfigError for the flat family.
double default_radius(const PotentialSpec& p, double tail = 1e-12);

/// Normalized discrete Gibbs measure mu_i proportional to e^{-V(x_i)} h^dim.
struct WeightedMeasure {
  GridFunction weights;       // mu_i, summing to 1
  double normalization = 0.0; // Z = sum_i e^{-(V_i - shift)} h^dim
  double potential_shift = 0.0;  // min_i V(x_i), subtracted before exponentiating
  /// max over boundary nodes of e^{-V} relative to the largest node weight.
  double tail_ratio = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

WeightedMeasure build_measure(const PotentialSpec& p, const Grid& g);

double mean(const WeightedMeasure& m, const GridFunction& f);
double inner(const WeightedMeasure& m, const GridFunction& f, const GridFunction& g);
double variance(const WeightedMeasure& m, const GridFunction& f);
/// mu(g log g) - mu(g) log mu(g) with 0 log 0 = 0. Throws ConfigError if g has
/// a negative entry.
double entropy(const WeightedMeasure& m, const GridFunction& g);

/// One edge of the finite-volume stencil with weight e^{-(V(midpoint) - shift)}.
struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

/// Finite-volume discretization of L = Delta - grad V . grad with reflecting
/// boundary:
///   (Lf)_i = 1/(w_i h^2) sum_{j~i} w_ij (f_j - f_i),
/// where w_i = e^{-V(x_i)} and w_ij = e^{-V(edge midpoint)}. The matrix is
/// symmetric in L^2(mu), has zero row sums and nonnegative off-diagonals.
class Generator {
 public:
  Generator(Grid grid, WeightedMeasure measure, GridFunction node_weights, std::vector<Edge> edges);

  const Grid& grid() const { return grid_; }
  const WeightedMeasure& measure() const { return measure_; }
  /// Unnormalized node weights w_i = e^{-(V_i - shift)}.
  const GridFunction& node_weights() const { return node_weights_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  std::size_t size() const { return grid_.size(); }

  GridFunction apply(const GridFunction& f) const { return matrix_ * f; }
  /// Symmetrized -L: D(-L)D^{-1} with D = diag(sqrt(mu_i)).
  Eigen::SparseMatrix<double> symmetrized_negative() const;

 private:
  Grid grid_;
  WeightedMeasure measure_;
  GridFunction node_weights_;
  std::vector<Edge> edges_;
  Eigen::SparseMatrix<double> matrix_;
};

Generator build_generator(const PotentialSpec& p, const Grid& g, const WeightedMeasure& m);
/// Convenience overload building grid measure and generator in one go.
Generator build_generator(const PotentialSpec& p, const Grid& g);

/// E(f, g) = sum over edges of w_ij h^{dim-2} (f_j - f_i)(g_j - g_i) / Z; equals
/// -<f, Lg>_mu exactly because the stencil shares the same edge weights.
double dirichlet_form(const Generator& gen, const GridFunction& f, const GridFunction& g);
inline double energy(const Generator& gen, const GridFunction& f) {
  return dirichlet_form(gen, f, f);
}

/// |grad f| at each node from partial_derivative.
GridFunction gradient_norm(const Grid& grid, const GridFunction& f);
/// Partial derivative along `axis`: fourth-order central differences, second order
/// next to the boundary, one-sided on it.
GridFunction partial_derivative(const Grid& grid, const GridFunction& f, int axis);

/// Samples a function of the node coordinates.
template <typename F>
GridFunction tabulate(const Grid& grid, F&& fn) {
  GridFunction out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out[static_cast<Eigen::Index>(i)] = fn(grid.node(i));
  return out;
}

}  // namespace lsi
