#include "lsi/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

#include "lsi/error.hpp"
#include "lsi/parallel.hpp"
#include "lsi/sampling.hpp"

namespace lsi {

ConstantChain constant_chain(double c, double b, double K, double lambda_mu, double mu0, double t0) {
  if (!(K > 0.0)) throw ConfigError("constant chain requires K > 0 (use the log-concave branch)");
  if (!(t0 > 0.0)) throw ConfigError("constant chain requires t0 > 0");
  if (!(lambda_mu > 0.0)) throw ConfigError("constant chain requires a positive spectral gap");
  if (!(c > 0.0) || !(b >= 0.0)) throw ConfigError("constant chain requires c > 0 and b >= 0");
  if (!(mu0 > 0.0) || mu0 > 1.0) throw ConfigError("mu0 must lie in (0, 1]");

  ConstantChain ch;
  ch.K = K;
  ch.t0 = t0;
  ch.c = c;
  ch.b = b;
  ch.mu0 = mu0;
  ch.lambda_mu = lambda_mu;
  const double delta = -std::expm1(-2.0 * K * t0);  // 1 - e^{-2K t0}
  const double log_mu0 = std::log(mu0);
  ch.eta = c * delta / (2.0 * K);
  ch.A = K + b - c * log_mu0 / (2.0 * K) + 3.0 * ch.eta;
  ch.C1 = 2.0 * K * std::exp(2.0 * K * t0) / (c * delta);
  ch.C2 = 2.0 * b * K / (c * delta);
  ch.C3 = -log_mu0 / delta;
  ch.C4 = 2.0 * std::expm1(2.0 * K * t0) / K;
  ch.C_step = 1.0 + ch.eta * (ch.C1 + 2.0 * ch.C4) + (ch.A + ch.eta * (2.0 + ch.C2 + ch.C3)) / lambda_mu;
  ch.C_lsi = ch.C_step / ch.eta;
  return ch;
}

ConstantChain constant_chain(const LyapunovCertificate& cert, double K, double lambda_mu, double mu0,
                             double t0) {
  return constant_chain(cert.c, cert.b, K, lambda_mu, mu0, t0);
}

double certify_logconcave(double c) {
  if (!(c > 0.0)) throw ConfigError("log-concave branch requires Hess V >= c with c > 0");
  return 2.0 / c;
}

double lsi_ratio(const Generator& gen, const GridFunction& f) {
  const double e = energy(gen, f);
  if (!(e > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return entropy(gen.measure(), f.array().square().matrix()) / e;
}

namespace {

class Ascent {
 public:
  explicit Ascent(const SpectralDecomposition& dec)
      : gen_(dec.generator()), m_(dec.measure()), sqrt_mu_(m_.weights.array().sqrt()) {
    Eigen::SparseMatrix<double> a = gen_.symmetrized_negative();
    for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += 1.0;
    precond_.compute(a);
    if (precond_.info() != Eigen::Success) throw NumericalError("oracle preconditioner failed");
  }

  double run(GridFunction& f, int iters) const {
    normalize(f);
    double ratio = value(f);
    if (!std::isfinite(ratio)) return ratio;
    double step = 0.1;
    for (int it = 0; it < iters && step > 1e-12; ++it) {
      const GridFunction dir = direction(f, ratio);
      const double norm = std::sqrt(mean(m_, dir.array().square().matrix()));
      if (!(norm > 0.0) || !std::isfinite(norm)) break;
      while (step > 1e-12) {
        GridFunction candidate = f + (step / norm) * dir;
        normalize(candidate);
        const double r = value(candidate);
        if (std::isfinite(r) && r > ratio) {
          f = std::move(candidate);
          ratio = r;
          step *= 1.5;
          break;
        }
        step *= 0.5;
      }
    }
    return ratio;
  }

  double value(const GridFunction& f) const { return lsi_ratio(gen_, f); }

 private:
  void normalize(GridFunction& f) const {
    const double n2 = mean(m_, f.array().square().matrix());
    if (n2 > 0.0) f /= std::sqrt(n2);
  }

  // mu-gradient of Ent(f^2)/E(f,f), smoothed by (I - L)^{-1}.
  GridFunction direction(const GridFunction& f, double ratio) const {
    const double e = energy(gen_, f);
    const double mf2 = mean(m_, f.array().square().matrix());
    GridFunction dent(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double f2 = f[i] * f[i];
      dent[i] = f2 > 0.0 ? 2.0 * f[i] * std::log(f2 / mf2) : 0.0;
    }
    const GridFunction grad = (dent + 2.0 * ratio * gen_.apply(f)) / e;
    const Eigen::VectorXd y = precond_.solve((sqrt_mu_.array() * grad.array()).matrix());
    return y.array() / sqrt_mu_.array();
  }

  const Generator& gen_;
  const WeightedMeasure& m_;
  Eigen::VectorXd sqrt_mu_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> precond_;
};

}  // namespace

OracleResult oracle_lsi_lower_bound(const SpectralDecomposition& dec, const OracleOptions& options) {
  if (options.starts < 1) throw ConfigError("oracle needs at least one start");
  if (options.iters < 0) throw ConfigError("oracle iterations must be nonnegative");
  const Grid& grid = dec.grid();
  const Ascent ascent(dec);

  struct Start {
    std::string label;
    GridFunction f;
  };
  std::vector<Start> starts;
  for (int k = 0; k < options.starts; ++k) {
    const int level = k / 3 + 1;
    const int kind = k % 3;
    if (kind == 0) {
      const double lambda = 0.5 * level;
      starts.push_back({"tilt lambda=" + std::to_string(lambda),
                        tabulate(grid, [&](const Point& x) { return std::exp(0.5 * lambda * x[0]); })});
    } else {
      if (level >= dec.mode_count()) continue;
      GridFunction mode = dec.mode(level);
      if (kind == 1) {
        starts.push_back({"1 + 0.5 mode " + std::to_string(level),
                          (1.0 + 0.5 * (mode / mode.cwiseAbs().maxCoeff()).array()).matrix()});
      } else {
        starts.push_back({"mode " + std::to_string(level), std::move(mode)});
      }
    }
  }

  std::vector<double> finals(starts.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<GridFunction> optimized(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    GridFunction f = starts[s].f;
    finals[s] = ascent.run(f, options.iters);
    optimized[s] = std::move(f);
  });

  OracleResult out;
  out.value = -std::numeric_limits<double>::infinity();
  out.start_values = finals;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (std::isfinite(finals[s]) && finals[s] > out.value) {
      out.value = finals[s];
      out.best_start = starts[s].label;
      out.best_f = optimized[s];
    }
  }
  if (!std::isfinite(out.value)) throw NumericalError("every oracle start is degenerate (constant)");
  return out;
}

CheckReport check_lsi(const Generator& gen, double C, const std::vector<GridFunction>& fs,
                      double tolerance) {
  CheckReport report("lsi_direct", tolerance);
  report.details["C"] = C;
  for (std::size_t s = 0; s < fs.size(); ++s) {
    const double rhs = C * energy(gen, fs[s]);
    const double ent = entropy(gen.measure(), fs[s].array().square().matrix());
    Location where;
    where.sample = static_cast<std::int64_t>(s);
    report.record((rhs - ent) / std::max(1.0, rhs), where);
  }
  report.finalize();
  return report;
}

CheckReport check_pre_last(const Generator& gen, const ConstantChain& ch,
                           const std::vector<GridFunction>& fs, double tolerance) {
  const auto& m = gen.measure();
  CheckReport report("pre_last", tolerance);
  for (std::size_t s = 0; s < fs.size(); ++s) {
    const GridFunction& f = fs[s];
    const GridFunction f2 = f.array().square();
    const double rhs = (1.0 + ch.eta * (ch.C1 + 2.0 * ch.C4)) * energy(gen, f) +
                       ch.eta * ch.C2 * mean(m, f2) + (ch.A + ch.eta * ch.C3) * variance(m, f);
    const double lhs = ch.eta * entropy(m, f2);
    Location where;
    where.sample = static_cast<std::int64_t>(s);
    report.record((rhs - lhs) / std::max(1.0, rhs), where);
  }
  report.finalize();
  return report;
}

bool CertifyReport::all_passed() const {
  if (!sound) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& r) { return r.passed; });
}

CertifyReport certify(const PotentialSpec& p, const Grid& grid, const CertifyOptions& options) {
  const Generator gen = build_generator(p, grid);
  return certify(p, decompose(gen, options.spectral), options);
}

CertifyReport certify(const PotentialSpec& p, const SpectralDecomposition& dec,
                      const CertifyOptions& options) {
  const Generator& gen = dec.generator();
  const Grid& grid = dec.grid();
  CertifyReport report;
  report.radius = grid.radius();
  report.nodes = grid.size();
  report.tail_ratio = dec.measure().tail_ratio;
  report.curvature = curvature_lower_bound(p, grid.radius());
  report.lambda_mu = spectral_gap(dec);
  if (report.tail_ratio >= 1e-12) {
    report.notes.push_back("tail indicator e^{-V(R)}/max e^{-V} = " + std::to_string(report.tail_ratio) +
                           " is not below 1e-12; the radius may be too small");
  }
  if (!report.curvature.attained_inside) {
    report.notes.push_back("curvature infimum attained on the box boundary; it may not be the global one");
  }

  std::mt19937_64 rng(options.seed);
  std::vector<GridFunction> tests = random_smooth_functions(grid, rng, options.random_functions);
  std::vector<GridFunction> modes;
  for (int k = 1; k < std::min(dec.mode_count(), 21); ++k) modes.push_back(dec.mode(k));

  if (!options.K_override && report.curvature.log_concave) {
    report.branch = "log-concave";
    report.C_certified = certify_logconcave(report.curvature.kappa);
  } else {
    report.branch = "lyapunov";
    const double K = options.K_override ? *options.K_override : report.curvature.K;
    if (options.K_override && !(K > 0.0)) throw ConfigError("chain.K_override must be positive");
    report.K_chain = std::max(K, kMinChainCurvature);
    report.K_clamped = K < kMinChainCurvature;
    if (report.K_clamped) {
      report.notes.push_back("curvature bound K = " + std::to_string(K) + " clamped to " +
                             std::to_string(kMinChainCurvature) + " for the constant chain");
    }

    LyapunovFitOptions fit = options.fit;
    fit.tolerance = options.check_tolerance;
    const auto cert = fit_lyapunov_exponential(gen, p, options.a_grid, fit);

    std::vector<GridFunction> hs = modes;
    hs.insert(hs.end(), tests.begin(), tests.end());
    report.checks.push_back(check_translya(gen, cert, hs, options.check_tolerance));
    report.checks.push_back(check_indicator_form(gen, cert, 0.0, options.check_tolerance));
    const auto unit_ball = check_indicator_form(gen, cert, 1.0, options.check_tolerance);
    report.notes.push_back(std::string("indicator form with the unit ball: ") +
                           (unit_ball.passed ? "holds" : "fails") + " (informational)");

    const GridFunction probe = (1.0 + 0.5 * (modes.front() / modes.front().cwiseAbs().maxCoeff()).array()).matrix();
    auto upper = check_pt_upper(dec, probe, report.K_chain, options.t0, p.x0(), options.check_tolerance);
    report.checks.push_back(upper.report);

    const auto chain = constant_chain(cert, report.K_chain, report.lambda_mu, upper.mu0, options.t0);
    report.checks.push_back(check_pre_last(gen, chain, tests, options.check_tolerance));
    if (options.t0_scan) {
      for (int k = 0; k < 20; ++k) {
        const double t0 = 0.1 + 0.1 * k;
        report.t0_scan.emplace_back(
            t0, constant_chain(cert, report.K_chain, report.lambda_mu, upper.mu0, t0).C_lsi);
      }
    }
    report.certificate = cert;
    report.chain = chain;
    report.C_certified = chain.C_lsi;
  }

  std::vector<GridFunction> lsi_tests = modes;
  lsi_tests.insert(lsi_tests.end(), tests.begin(), tests.end());
  report.checks.push_back(check_lsi(gen, report.C_certified, lsi_tests));

  report.oracle = oracle_lsi_lower_bound(dec, options.oracle);
  report.sound = report.C_certified >= report.oracle.value - 1e-6;
  return report;
}

}  // namespace lsi
