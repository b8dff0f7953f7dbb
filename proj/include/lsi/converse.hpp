#pragma once

#include <string>
#include <vector>

#include "lsi/certify.hpp"
#include "lsi/check_report.hpp"
#include "lsi/error.hpp"
#include "lsi/lyapunov.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

/// H = -L + diag(phi) with phi = rho (-c d^2(., x0) + b) and b = 2 mu(e^{c d^2}).
struct SchroedingerProblem {
  double rho = 0.0;
  double c = 0.0;
  double b = 0.0;
  Point x0;
  GridFunction d2;
  GridFunction phi;
  /// Whether the summand mu_i e^{c d_i^2} still decreases toward the boundary,
  /// the discrete stand-in for mu(e^{c d^2}) < infinity.
  bool tail_decreasing = true;
  /// Largest ratio of a boundary summand to its inward neighbour.
  double tail_ratio = 0.0;
};

/// Throws ConfigError for rho <= 0 or c <= 0, NumericalError when e^{c d^2}
/// would overflow on the grid.
SchroedingerProblem schroedinger_potential(const Generator& gen, const Point& x0, double rho, double c);

/// Smallest eigenvalue of the symmetrized operator D(-L)D^{-1} + diag(phi).
double smallest_eigenvalue(const Generator& gen, const SchroedingerProblem& prob);

/// Raised when the symmetrized H has a nonpositive eigenvalue.
class IndefiniteOperator : public NumericalError {
 public:
  IndefiniteOperator(const std::string& what, double lambda_min)
      : NumericalError(what), lambda_min_(lambda_min) {}
  double lambda_min() const { return lambda_min_; }

 private:
  double lambda_min_;
};

struct ConverseResult {
  SchroedingerProblem problem;
  GridFunction u;
  LyapunovCertificate certificate;  // W = u with constants (rho c, rho b)
  double lambda_min = 0.0;
  /// ||Hu - 1||_inf / (||u||_inf ||H||_inf).
  double residual = 0.0;
  int refinement_steps = 0;
};

/// Solves Hu = 1 through the symmetric system diag(w) H u = w (w the node
/// weights) with iterative refinement. Throws IndefiniteOperator when H is not
/// positive definite and NumericalError when the residual stays above
/// residual_tol or u fails to be positive.
ConverseResult solve_lyapunov_from_lsi(const Generator& gen, const SchroedingerProblem& prob,
                                       double residual_tol = 1e-10);

/// Lower display <u, Hu> >= (E(u,u) + rho b mu u^2) / 2 and upper display
/// <u, Hu> <= E(u,u) + rho b mu u^2; margins divided by E(u,u) + rho b mu u^2.
CheckReport coercivity_check(const Generator& gen, const SchroedingerProblem& prob, const GridFunction& u,
                             double tolerance = 1e-8);

/// c values rho 2^k, k = -1..4.
std::vector<double> default_converse_ladder(double rho);

struct ConverseLadderEntry {
  double c = 0.0;
  double b = 0.0;
  double lambda_min = 0.0;
  bool tail_decreasing = false;
  bool accepted = false;
  std::string skipped;  // reason when not evaluated
};

struct ConverseScan {
  std::vector<ConverseLadderEntry> entries;
  /// Index into entries of the largest accepted c, or -1.
  int best = -1;
};

/// Evaluates the ladder: entries whose e^{c d^2} overflows or whose tail
/// summand does not decrease are skipped; the rest are accepted iff H is
/// positive definite.
ConverseScan scan_converse_ladder(const Generator& gen, const Point& x0, double rho,
                                  const std::vector<double>& ladder);

/// Feeds the extracted certificate back into the constant chain, with K from
/// the curvature bound (clamped), the spectral gap of dec and mu0 at x0.
ConstantChain converse_chain(const SpectralDecomposition& dec, const PotentialSpec& p,
                             const ConverseResult& result, double t0 = 1.0);

}  // namespace lsi
