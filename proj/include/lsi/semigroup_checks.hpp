#pragma once

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "lsi/check_report.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

using NodePair = std::pair<std::size_t, std::size_t>;

/// Harnack-type bound (P_t f)^2(x) <= P_t f^2(y) exp(K d^2(x,y) / (1 - e^{-2Kt})),
/// checked in log form:
///   margin = log P_t f^2(y) + K d^2 / (1 - e^{-2Kt}) - 2 log P_t f(x).
/// K may have either sign; K = 0 uses the limit exponent d^2 / (2t). Nodes with
/// P_t f(x) <= 1e-30 are skipped.
CheckReport check_harnack(const SpectralDecomposition& dec, const GridFunction& f, double K,
                          const std::vector<double>& times, const std::vector<NodePair>& pairs,
                          double tolerance = 1e-8);

/// |grad P_t f| <= e^{Kt} P_t |grad f| at interior nodes. Margins are divided
/// by ||grad f||_inf.
CheckReport check_gradient_commutation(const SpectralDecomposition& dec, const GridFunction& f,
                                       double K, const std::vector<double>& times,
                                       double tolerance = 1e-6);
/// Same check restricted to the given nodes (boundary nodes are skipped).
CheckReport check_gradient_commutation(const SpectralDecomposition& dec, const GridFunction& f,
                                       double K, const std::vector<double>& times,
                                       const std::vector<std::size_t>& nodes, double tolerance = 1e-6);

/// mu0 = mu(e^{-2K d^2(x0, .)}) on the discrete measure.
double base_point_mass(const WeightedMeasure& m, const Grid& grid, const Point& x0, double K);

struct PtUpperResult {
  CheckReport report;
  double mu0 = 0.0;
};

/// (P_t f)^2(x) / mu f^2 <= mu0^{-1/(1-e^{-2Kt})} exp(2K d^2(x0,x) / (1-e^{-2Kt}))
/// at every node; margin = right side - left side. Throws ConfigError for
/// K <= 0, t <= 0 or mu f^2 = 0.
PtUpperResult check_pt_upper(const SpectralDecomposition& dec, const GridFunction& f, double K,
                             double t, const Point& x0, double tolerance = 1e-8);

/// Random node pairs drawn uniformly from the nodes within `fraction` of the
/// radius (bulk of the grid).
std::vector<NodePair> sample_pairs(const Grid& grid, std::size_t count, std::mt19937_64& rng,
                                   double fraction = 0.75);

}  // namespace lsi
