#include "lsi/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsi/error.hpp"

namespace lsi {

std::vector<double> LyapunovFitOptions::default_c_ladder() {
  std::vector<double> ladder;
  for (int k = 1; k <= 16; ++k) ladder.push_back(k / 16.0);
  return ladder;
}

LyapunovCertificate evaluate_lyapunov(const Generator& gen, const GridFunction& W, double c, double b,
                                      const Point& x0, double tolerance) {
  const Grid& grid = gen.grid();
  if (W.size() != static_cast<Eigen::Index>(grid.size())) throw ConfigError("W has the wrong size");
  if (!(W.minCoeff() > 0.0) || !W.allFinite()) throw ConfigError("Lyapunov function must be positive");
  if (!(c > 0.0)) throw ConfigError("Lyapunov constant c must be positive");
  if (!(b >= 0.0)) throw ConfigError("Lyapunov constant b must be nonnegative");

  LyapunovCertificate cert;
  cert.W = W;
  cert.c = c;
  cert.b = b;
  cert.x0 = x0;
  cert.tolerance = tolerance;
  cert.r_star = std::sqrt(b / c);
  cert.indicator_radius = std::sqrt((b + c) / c);
  cert.min_W = W.minCoeff();

  const GridFunction d2 = grid.squared_distances(x0);
  const GridFunction lw = gen.apply(W);
  cert.margin = ((-c * d2.array() + b) * W.array() - lw.array()).matrix();

  const double scale = W.maxCoeff();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_boundary(i)) {
      ++cert.excluded_boundary;
      continue;
    }
    const double scaled = cert.margin[static_cast<Eigen::Index>(i)] / scale;
    if (scaled < cert.worst_scaled_margin) {
      cert.worst_scaled_margin = scaled;
      cert.worst_node = static_cast<std::int64_t>(i);
    }
  }
  cert.passed = cert.worst_scaled_margin >= -tolerance;
  return cert;
}

LyapunovCertificate verify_lyapunov(const Generator& gen, const GridFunction& W, double c, double b,
                                    const Point& x0, double tolerance) {
  auto cert = evaluate_lyapunov(gen, W, c, b, x0, tolerance);
  if (!cert.passed) {
    const auto x = gen.grid().node(static_cast<std::size_t>(cert.worst_node));
    throw LyapunovViolation("Lyapunov condition violated at x = " + std::to_string(x[0]) +
                                " (scaled margin " + std::to_string(cert.worst_scaled_margin) + ")",
                            std::move(cert));
  }
  return cert;
}

LyapunovCertificate fit_lyapunov_exponential(const Generator& gen, const PotentialSpec& p,
                                             const std::vector<double>& a_grid,
                                             const LyapunovFitOptions& options) {
  const Grid& grid = gen.grid();
  const GridFunction d2 = grid.squared_distances(p.x0());
  const double inner_radius = options.inner_fraction * grid.radius();

  bool found = false;
  LyapunovCertificate best;
  for (double a : a_grid) {
    if (!(a > 0.0)) throw ConfigError("Lyapunov exponents must be positive");
    if (a * d2.maxCoeff() > 600.0) continue;  // e^{a d^2} not representable with headroom
    const GridFunction W = (a * d2.array()).exp();
    const GridFunction ratio = gen.apply(W).array() / W.array();

    for (double c : options.c_ladder) {
      if (!(c > 0.0)) throw ConfigError("Lyapunov c ladder entries must be positive");
      double b_all = -std::numeric_limits<double>::infinity();
      double b_inner = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_boundary(i)) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        const double q = ratio[ii] + c * d2[ii];
        b_all = std::max(b_all, q);
        if (grid.node(i).cwiseAbs().maxCoeff() <= inner_radius) b_inner = std::max(b_inner, q);
      }
      if (b_all - b_inner > options.truncation_tolerance * std::max(1.0, std::abs(b_inner))) continue;
      const double b = std::max(0.0, b_all);
      auto cert = evaluate_lyapunov(gen, W, c, b, p.x0(), options.tolerance);
      if (!cert.passed) continue;
      cert.exponent = a;
      if (!found || c > best.c || (c == best.c && b < best.b)) {
        best = std::move(cert);
        found = true;
      }
    }
  }
  if (!found) {
    throw CheckFailure("no feasible exponential Lyapunov certificate: the binding constraint "
                       "sits at the truncation boundary for every (a, c)");
  }
  return best;
}

CheckReport check_translya(const Generator& gen, const LyapunovCertificate& cert,
                           const std::vector<GridFunction>& hs, double tolerance) {
  const auto& m = gen.measure();
  const GridFunction d2 = gen.grid().squared_distances(cert.x0);
  CheckReport report("translya", tolerance);
  for (std::size_t s = 0; s < hs.size(); ++s) {
    const GridFunction& h = hs[s];
    const GridFunction h2 = h.array().square();
    const double rhs = energy(gen, h) / cert.c + cert.b / cert.c * mean(m, h2);
    const double lhs = inner(m, h2, d2);
    Location where;
    where.sample = static_cast<std::int64_t>(s);
    report.record((rhs - lhs) / std::max(1.0, rhs), where);
  }
  report.finalize();
  return report;
}

CheckReport check_indicator_form(const Generator& gen, const LyapunovCertificate& cert, double radius,
                                 double tolerance) {
  const Grid& grid = gen.grid();
  if (radius <= 0.0) radius = cert.indicator_radius;
  const GridFunction d2 = grid.squared_distances(cert.x0);
  const GridFunction lw = gen.apply(cert.W);
  const double scale = cert.W.maxCoeff();
  CheckReport report("indicator_form", tolerance);
  report.details["radius"] = radius;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_boundary(i)) {
      report.skip();
      continue;
    }
    const auto ii = static_cast<Eigen::Index>(i);
    const double bound = -cert.c + (d2[ii] <= radius * radius ? cert.c + cert.b : 0.0);
    Location where;
    where.node = static_cast<std::int64_t>(i);
    report.record((bound * cert.W[ii] - lw[ii]) / scale, where);
  }
  report.finalize();
  return report;
}

}  // namespace lsi
