#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "lsi/check_report.hpp"
#include "lsi/discretization.hpp"
#include "lsi/error.hpp"

namespace lsi {

/// Pointwise certificate for LW <= (-c d^2(x, x0) + b) W on the grid.
struct LyapunovCertificate {
  GridFunction W;
  double c = 0.0;
  double b = 0.0;
  Point x0;
  /// (-c d^2 + b) W - LW at every node, unscaled.
  GridFunction margin;
  /// Zero of -c d^2 + b.
  double r_star = 0.0;
  /// Radius r with -c d^2 + b <= -c + (c + b) 1_{d <= r}, i.e. sqrt((b + c) / c).
  double indicator_radius = 0.0;
  double min_W = 0.0;
  /// Smallest interior margin divided by ||W||_inf.
  double worst_scaled_margin = std::numeric_limits<double>::infinity();
  std::int64_t worst_node = -1;
  std::size_t excluded_boundary = 0;
  double tolerance = 1e-8;
  bool passed = false;
  /// Exponent a of W = e^{a d^2} when the certificate was fitted.
  double exponent = std::numeric_limits<double>::quiet_NaN();
};

class LyapunovViolation : public CheckFailure {
 public:
  LyapunovViolation(const std::string& what, LyapunovCertificate cert)
      : CheckFailure(what), certificate_(std::move(cert)) {}
  const LyapunovCertificate& certificate() const { return certificate_; }

 private:
  LyapunovCertificate certificate_;
};

/// Computes the certificate without throwing on violated margins. Boundary
/// nodes are excluded from the pass/fail decision and counted.
LyapunovCertificate evaluate_lyapunov(const Generator& gen, const GridFunction& W, double c, double b,
                                      const Point& x0, double tolerance = 1e-8);

/// As evaluate_lyapunov, but throws LyapunovViolation when an interior margin
/// falls below -tolerance * ||W||_inf, and ConfigError for W <= 0, c <= 0 or b < 0.
LyapunovCertificate verify_lyapunov(const Generator& gen, const GridFunction& W, double c, double b,
                                    const Point& x0, double tolerance = 1e-8);

struct LyapunovFitOptions {
  /// Candidate decay rates c, tried for every exponent a.
  std::vector<double> c_ladder = default_c_ladder();
  /// Sub-box (as a fraction of the radius) used to detect truncation artifacts.
  double inner_fraction = 0.75;
  /// Largest relative increase of the minimal b allowed when the outer band is added.
  double truncation_tolerance = 1e-4;
  double tolerance = 1e-8;

  static std::vector<double> default_c_ladder();
};

/// For each a, W = e^{a d^2(., x0)}; for each c the smallest feasible b is
/// max_i (LW_i / W_i + c d_i^2) over interior nodes. A pair (a, c) is accepted
/// only when that maximum is already reached inside the inner sub-box, i.e. it
/// is not produced by the truncation. Returns the accepted certificate with the
/// largest c (ties: smaller b). Throws CheckFailure when nothing is accepted.
LyapunovCertificate fit_lyapunov_exponential(const Generator& gen, const PotentialSpec& p,
                                             const std::vector<double>& a_grid,
                                             const LyapunovFitOptions& options = {});

/// mu(h^2 d^2) <= (1/c) E(h,h) + (b/c) mu h^2 for each h. Margins are divided
/// by the right-hand side (or 1 when it is below 1).
CheckReport check_translya(const Generator& gen, const LyapunovCertificate& cert,
                           const std::vector<GridFunction>& hs, double tolerance = 1e-8);

/// LW <= [-c + (c + b) 1_{d <= radius}] W at interior nodes, margins scaled by
/// ||W||_inf. radius <= 0 selects cert.indicator_radius.
CheckReport check_indicator_form(const Generator& gen, const LyapunovCertificate& cert,
                                 double radius = 0.0, double tolerance = 1e-8);

}  // namespace lsi
