#include "lsi/semigroup_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lsi/error.hpp"
#include "lsi/parallel.hpp"

namespace lsi {

namespace {

// K d^2 / (1 - e^{-2Kt}) with the K -> 0 limit d^2 / (2t).
double harnack_exponent(double K, double d2, double t) {
  if (std::abs(K * t) < 1e-12) return d2 / (2.0 * t);
  return K * d2 / (-std::expm1(-2.0 * K * t));
}

}  // namespace

CheckReport check_harnack(const SpectralDecomposition& dec, const GridFunction& f, double K,
                          const std::vector<double>& times, const std::vector<NodePair>& pairs,
                          double tolerance) {
  if (f.size() != static_cast<Eigen::Index>(dec.size())) throw ConfigError("check_harnack: size mismatch");
  if (f.minCoeff() < 0.0) throw ConfigError("check_harnack requires f >= 0");
  for (double t : times) {
    if (!(t > 0.0)) throw ConfigError("check_harnack requires t > 0");
  }
  const Grid& grid = dec.grid();
  const GridFunction f2 = f.array().square();

  std::vector<CheckReport> partial(times.size(), CheckReport("harnack", tolerance));
  parallel_for(times.size(), [&](std::size_t k) {
    const double t = times[k];
    const GridFunction pf = dec.heat_apply(f, t);
    const GridFunction pf2 = dec.heat_apply(f2, t);
    auto& report = partial[k];
    for (std::size_t s = 0; s < pairs.size(); ++s) {
      const auto [x, y] = pairs[s];
      const double px = pf[static_cast<Eigen::Index>(x)];
      const double py2 = pf2[static_cast<Eigen::Index>(y)];
      if (!(px > 1e-30) || !(py2 > 0.0)) {
        report.skip();
        continue;
      }
      const double d2 = squared_distance(grid.node(x), grid.node(y));
      const double margin = std::log(py2) + harnack_exponent(K, d2, t) - 2.0 * std::log(px);
      Location where;
      where.node = static_cast<std::int64_t>(x);
      where.other_node = static_cast<std::int64_t>(y);
      where.time = t;
      report.record(margin, where);
    }
  });
  CheckReport out("harnack", tolerance);
  for (const auto& r : partial) out.merge(r);
  out.details["K"] = K;
  out.finalize();
  return out;
}

CheckReport check_gradient_commutation(const SpectralDecomposition& dec, const GridFunction& f,
                                       double K, const std::vector<double>& times,
                                       const std::vector<std::size_t>& nodes, double tolerance) {
  const Grid& grid = dec.grid();
  if (f.size() != static_cast<Eigen::Index>(dec.size())) {
    throw ConfigError("check_gradient_commutation: size mismatch");
  }
  for (double t : times) {
    if (t < 0.0) throw ConfigError("check_gradient_commutation requires t >= 0");
  }
  for (std::size_t i : nodes) {
    if (i >= grid.size()) throw ConfigError("check_gradient_commutation: node out of range");
  }
  const GridFunction grad_f = gradient_norm(grid, f);
  const double scale = std::max(grad_f.maxCoeff(), std::numeric_limits<double>::min());

  std::vector<CheckReport> partial(times.size(), CheckReport("gradient_commutation", tolerance));
  parallel_for(times.size(), [&](std::size_t k) {
    const double t = times[k];
    const GridFunction lhs = gradient_norm(grid, dec.heat_apply(f, t));
    const GridFunction rhs = std::exp(K * t) * dec.heat_apply(grad_f, t);
    auto& report = partial[k];
    for (std::size_t i : nodes) {
      if (grid.is_boundary(i)) {
        report.skip();
        continue;
      }
      const auto ii = static_cast<Eigen::Index>(i);
      Location where;
      where.node = static_cast<std::int64_t>(i);
      where.time = t;
      report.record((rhs[ii] - lhs[ii]) / scale, where);
    }
  });
  CheckReport out("gradient_commutation", tolerance);
  for (const auto& r : partial) out.merge(r);
  out.details["K"] = K;
  out.details["gradient_scale"] = scale;
  out.finalize();
  return out;
}

CheckReport check_gradient_commutation(const SpectralDecomposition& dec, const GridFunction& f,
                                       double K, const std::vector<double>& times, double tolerance) {
  std::vector<std::size_t> all(dec.grid().size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return check_gradient_commutation(dec, f, K, times, all, tolerance);
}

double base_point_mass(const WeightedMeasure& m, const Grid& grid, const Point& x0, double K) {
  const GridFunction d2 = grid.squared_distances(x0);
  return (m.weights.array() * (-2.0 * K * d2.array()).exp()).sum();
}

PtUpperResult check_pt_upper(const SpectralDecomposition& dec, const GridFunction& f, double K,
                             double t, const Point& x0, double tolerance) {
  if (!(K > 0.0)) throw ConfigError("check_pt_upper requires K > 0");
  if (!(t > 0.0)) throw ConfigError("check_pt_upper requires t > 0");
  const auto& m = dec.measure();
  const Grid& grid = dec.grid();
  const double mf2 = mean(m, f.array().square().matrix());
  if (!(mf2 > 0.0)) throw ConfigError("check_pt_upper requires mu f^2 > 0");

  PtUpperResult out{CheckReport("pt_upper", tolerance), base_point_mass(m, grid, x0, K)};
  const double delta = -std::expm1(-2.0 * K * t);
  const GridFunction pf = dec.heat_apply(f, t);
  const GridFunction d2 = grid.squared_distances(x0);
  const double log_prefactor = -std::log(out.mu0) / delta;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double rhs = std::exp(log_prefactor + 2.0 * K * d2[ii] / delta);
    const double lhs = pf[ii] * pf[ii] / mf2;
    Location where;
    where.node = static_cast<std::int64_t>(i);
    where.time = t;
    out.report.record(std::isinf(rhs) ? rhs : rhs - lhs, where);
  }
  out.report.details["mu0"] = out.mu0;
  out.report.details["K"] = K;
  out.report.finalize();
  return out;
}

std::vector<NodePair> sample_pairs(const Grid& grid, std::size_t count, std::mt19937_64& rng,
                                   double fraction) {
  std::vector<std::size_t> bulk;
  const double limit = fraction * grid.radius();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.node(i).cwiseAbs().maxCoeff() <= limit) bulk.push_back(i);
  }
  if (bulk.empty()) throw ConfigError("no bulk nodes to sample");
  std::uniform_int_distribution<std::size_t> pick(0, bulk.size() - 1);
  std::vector<NodePair> pairs;
  pairs.reserve(count);
  for (std::size_t s = 0; s < count; ++s) pairs.emplace_back(bulk[pick(rng)], bulk[pick(rng)]);
  return pairs;
}

}  // namespace lsi
