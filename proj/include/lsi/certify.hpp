#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsi/check_report.hpp"
#include "lsi/lyapunov.hpp"
#include "lsi/semigroup_checks.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

/// Every named constant of the heat-flow proof that the Lyapunov condition
/// plus a curvature lower bound -K implies the LSI, together with the
/// resulting LSI constant.
struct ConstantChain {
  double K = 0.0;
  double t0 = 1.0;
  double c = 0.0;
  double b = 0.0;
  double eta = 0.0;        // c (1 - e^{-2K t0}) / (2K)
  double mu0 = 1.0;        // mu(e^{-2K d^2(x0, .)})
  double A = 0.0;          // K + b - c log(mu0) / (2K) + 3 eta
  double C1 = 0.0;         // 2K e^{2K t0} / (c (1 - e^{-2K t0}))
  double C2 = 0.0;         // 2bK / (c (1 - e^{-2K t0}))
  double C3 = 0.0;         // -log(mu0) / (1 - e^{-2K t0})
  double C4 = 0.0;         // 2 (e^{2K t0} - 1) / K
  double lambda_mu = 0.0;  // spectral gap
  double C_step = 0.0;     // 1 + eta (C1 + 2 C4) + (A + eta (2 + C2 + C3)) / lambda_mu
  double C_lsi = 0.0;      // C_step / eta; Ent(f^2) <= C_lsi E(f, f)
};

/// Throws ConfigError for K <= 0, t0 <= 0, lambda_mu <= 0, c <= 0, b < 0 or
/// mu0 outside (0, 1].
ConstantChain constant_chain(double c, double b, double K, double lambda_mu, double mu0, double t0 = 1.0);
ConstantChain constant_chain(const LyapunovCertificate& cert, double K, double lambda_mu, double mu0,
                             double t0 = 1.0);

/// LSI constant 2/c for Hess V >= c > 0. Throws ConfigError for c <= 0.
double certify_logconcave(double c);

/// Ent(f^2) / E(f, f); NaN when E(f, f) vanishes.
double lsi_ratio(const Generator& gen, const GridFunction& f);

struct OracleOptions {
  int starts = 12;
  int iters = 200;
};

struct OracleResult {
  double value = 0.0;  // best Ent(f^2)/E(f,f) found: a lower bound on the optimal constant
  std::string best_start;
  GridFunction best_f;
  std::vector<double> start_values;  // final ratio per start (NaN when degenerate)
};

/// Maximizes Ent(f^2)/E(f,f) by preconditioned gradient ascent (step halving,
/// normalization mu f^2 = 1) from exponential tilts e^{lambda x / 2} and from
/// perturbations of constants by the low eigenmodes. Throws NumericalError when
/// every start is degenerate.
OracleResult oracle_lsi_lower_bound(const SpectralDecomposition& dec, const OracleOptions& options = {});

/// Ent(f^2) <= C E(f, f) for each f; margins divided by max(1, C E).
CheckReport check_lsi(const Generator& gen, double C, const std::vector<GridFunction>& fs,
                      double tolerance = 1e-10);

/// eta Ent(f^2) <= [1 + eta(C1 + 2 C4)] E[f] + eta C2 mu f^2 + (A + eta C3) Var(f)
/// for each f; margins divided by max(1, right side).
CheckReport check_pre_last(const Generator& gen, const ConstantChain& chain,
                           const std::vector<GridFunction>& fs, double tolerance = 1e-10);

struct CertifyOptions {
  SpectralOptions spectral;
  std::vector<double> a_grid = {0.125, 0.25, 0.375};
  LyapunovFitOptions fit;
  double t0 = 1.0;
  std::optional<double> K_override;  // forces the Lyapunov branch with this K
  bool t0_scan = false;
  OracleOptions oracle;
  double check_tolerance = 1e-8;
  int random_functions = 100;
  std::uint64_t seed = 1;
};

struct CertifyReport {
  std::string branch;  // "log-concave" or "lyapunov"
  CurvatureBound curvature;
  double radius = 0.0;
  std::size_t nodes = 0;
  double tail_ratio = 0.0;
  double K_chain = 0.0;
  bool K_clamped = false;
  double lambda_mu = 0.0;
  std::optional<LyapunovCertificate> certificate;
  std::optional<ConstantChain> chain;
  std::vector<std::pair<double, double>> t0_scan;  // (t0, C_lsi)
  double C_certified = 0.0;
  OracleResult oracle;
  bool sound = false;
  std::vector<CheckReport> checks;
  std::vector<std::string> notes;

  bool all_passed() const;
};

/// Runs the curvature bound, picks the branch (log-concave when kappa > 0 and
/// no K override, else Lyapunov fit + spectral gap + mu0 + constant chain),
/// and attaches the ascent oracle and the soundness verdict C >= oracle.
CertifyReport certify(const PotentialSpec& p, const Grid& grid, const CertifyOptions& options = {});
/// Variant reusing an existing decomposition of the generator of p on its grid.
CertifyReport certify(const PotentialSpec& p, const SpectralDecomposition& dec,
                      const CertifyOptions& options = {});

}  // namespace lsi
