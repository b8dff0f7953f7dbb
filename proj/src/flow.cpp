#include "lsi/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsi/error.hpp"

namespace lsi {

namespace {

double default_step(const SpectralDecomposition& dec, const FlowOptions& options) {
  return options.fd_step > 0.0 ? options.fd_step : 1e-4 / spectral_gap(dec);
}

// mu(g log(g / ref)) with 0 log 0 = 0.
double relative_entropy_sum(const WeightedMeasure& m, const GridFunction& g, double ref) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] > 0.0) acc += m.weights[i] * g[i] * std::log(g[i] / ref);
  }
  return acc;
}

void require_dim1(const SpectralDecomposition& dec, const char* what) {
  if (dec.grid().dim() != 1) throw ConfigError(std::string(what) + " is implemented in dimension 1");
}

double relative_error(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

// Richardson slopes combine three evaluations with weights up to 4/delta; each
// evaluation carries absolute rounding of a few eps times the size of its sums.
double roundoff_floor(double sums, double delta) {
  return 8.0 * std::numeric_limits<double>::epsilon() * sums / delta;
}

}  // namespace

double phi_functional(const SpectralDecomposition& dec, const GridFunction& f, double c, double t) {
  const GridFunction pf = dec.heat_apply(f, t).cwiseMax(0.0);
  return 2.0 * energy(dec.generator(), pf.cwiseSqrt()) - c * entropy(dec.measure(), pf);
}

double ent_star(const SpectralDecomposition& dec, const GridFunction& f, double t) {
  const auto& m = dec.measure();
  const double mf2 = mean(m, f.array().square().matrix());
  if (!(mf2 > 0.0)) return 0.0;
  const GridFunction pf = dec.heat_apply(f, t);
  return relative_entropy_sum(m, pf.array().square().matrix(), mf2);
}

double psi_functional(const SpectralDecomposition& dec, const GridFunction& f, const ConstantChain& chain,
                      double t) {
  const GridFunction pf = dec.heat_apply(f, t);
  return energy(dec.generator(), pf) + chain.A * variance(dec.measure(), pf) - chain.eta * ent_star(dec, f, t);
}

FlowTrace trace_phi(const SpectralDecomposition& dec, const GridFunction& f, double c,
                    const std::vector<double>& times, const FlowOptions& options) {
  if (!(f.minCoeff() > 0.0)) throw ConfigError("trace_phi requires a strictly positive f");
  if (!(c > 0.0)) throw ConfigError("trace_phi requires c > 0");
  const double delta = default_step(dec, options);
  auto phi = [&](double t) { return phi_functional(dec, f, c, t); };

  FlowTrace trace;
  trace.name = "phi";
  trace.times = times;
  const double phi0 = phi(0.0);
  const auto& m = dec.measure();
  const double mf = mean(m, f);
  const double sums = 2.0 * energy(dec.generator(), f.cwiseSqrt()) +
                      c * (mean(m, (f.array() * f.array().log()).abs().matrix()) + std::abs(mf * std::log(mf)) + mf);
  trace.roundoff_floor = roundoff_floor(sums, delta);
  trace.slope_tolerance = options.slope_tolerance * std::abs(phi0) + trace.roundoff_floor;
  auto& values = trace.values["Phi"];
  auto& slopes = trace.derivatives["Phi"];
  for (double t : times) {
    values.push_back(phi(t));
    slopes.push_back(richardson_derivative(phi, t, delta));
    trace.worst_slope = std::max(trace.worst_slope, slopes.back());
  }
  trace.monotone = trace.worst_slope <= trace.slope_tolerance;
  return trace;
}

FlowTrace trace_psi(const SpectralDecomposition& dec, const GridFunction& f, const ConstantChain& chain,
                    const std::vector<double>& times, const FlowOptions& options) {
  for (double t : times) {
    if (t < chain.t0) throw ConfigError("trace_psi times must be >= t0");
  }
  const double delta = std::min(default_step(dec, options), 0.5 * chain.t0);
  auto psi = [&](double t) { return psi_functional(dec, f, chain, t); };

  FlowTrace trace;
  trace.name = "psi";
  trace.times = times;
  const double psi0 = psi(chain.t0);
  const auto& m = dec.measure();
  const double mf2 = mean(m, f.array().square().matrix());
  const double sums = energy(dec.generator(), f) + chain.A * mf2 + chain.eta * mf2 * (1.0 + std::abs(std::log(mf2)));
  trace.roundoff_floor = roundoff_floor(sums, delta);
  trace.slope_tolerance = options.slope_tolerance * std::abs(psi0) + trace.roundoff_floor;
  auto& values = trace.values["Psi"];
  auto& slopes = trace.derivatives["Psi"];
  for (double t : times) {
    values.push_back(psi(t));
    slopes.push_back(richardson_derivative(psi, t, delta));
    trace.worst_slope = std::max(trace.worst_slope, slopes.back());
  }
  trace.monotone = trace.worst_slope <= trace.slope_tolerance && psi0 >= -1e-8 &&
                   (values.empty() || values.back() >= -1e-8);
  return trace;
}

ThetaValues theta_values(const SpectralDecomposition& dec, const GridFunction& f, double t) {
  const auto& m = dec.measure();
  const GridFunction f2 = f.array().square();
  const double mf2 = mean(m, f2);
  const GridFunction pf = dec.heat_apply(f, t);
  const GridFunction pf_sq = pf.array().square();
  // P_t f^2 >= (P_t f)^2 holds exactly in the continuum; clamp roundoff.
  const GridFunction p_f2 = dec.heat_apply(f2, t).cwiseMax(pf_sq);

  ThetaValues out;
  if (!(mf2 > 0.0)) return out;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double w = m.weights[i];
    if (pf_sq[i] > 0.0) {
      out.theta1 += w * (p_f2[i] - pf_sq[i]) * std::log(pf_sq[i] / mf2);
      out.theta2 += w * p_f2[i] * std::log(p_f2[i] / pf_sq[i]);
    }
  }
  out.ent_pf2 = relative_entropy_sum(m, p_f2, mean(m, p_f2));
  out.ent_star = relative_entropy_sum(m, pf_sq, mf2);
  return out;
}

CheckReport theta_bounds(const SpectralDecomposition& dec, const GridFunction& f, const ConstantChain& chain,
                         double tolerance) {
  const auto& m = dec.measure();
  const auto& gen = dec.generator();
  const GridFunction f2 = f.array().square();
  const double e = energy(gen, f);
  const auto th = theta_values(dec, f, chain.t0);

  CheckReport report("theta_bounds", tolerance);
  auto add = [&](double bound, double value, std::int64_t which) {
    Location where;
    where.sample = which;
    where.time = chain.t0;
    report.record((bound - value) / std::max(1.0, std::abs(bound)), where);
  };
  add(chain.C1 * e + chain.C2 * mean(m, f2) + chain.C3 * variance(m, f), th.theta1, 0);
  add(chain.C4 * e, th.theta2, 1);
  add(chain.C4 * e, entropy(m, f2) - entropy(m, dec.heat_apply(f2, chain.t0).cwiseMax(0.0)), 2);
  report.details["theta1"] = th.theta1;
  report.details["theta2"] = th.theta2;
  report.finalize();
  return report;
}

CheckReport check_energy_derivative(const SpectralDecomposition& dec, const PotentialSpec& p,
                                    const GridFunction& f, double t, const FlowOptions& options) {
  require_dim1(dec, "check_energy_derivative");
  if (!(t > 0.0)) throw ConfigError("check_energy_derivative requires t > 0");
  const Grid& grid = dec.grid();
  const auto& m = dec.measure();
  const double h = grid.spacing();
  const double delta = std::min(default_step(dec, options), 0.5 * t);

  const double lhs =
      richardson_derivative([&](double s) { return energy(dec.generator(), dec.heat_apply(f, s)); }, t, delta);

  const GridFunction phi = dec.heat_apply(f, t);
  double rhs = 0.0;
  for (Eigen::Index i = 1; i + 1 < phi.size(); ++i) {
    const double d1 = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
    const double d2 = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h);
    rhs += m.weights[i] * (d2 * d2 + p.profile_d2(grid.axis_coordinate(static_cast<int>(i))) * d1 * d1);
  }
  rhs *= -2.0;

  const double err = std::abs(lhs) + std::abs(rhs) > 0.0 ? relative_error(lhs, rhs) : 0.0;
  CheckReport report("energy_derivative", 10.0 * h * h);
  Location where;
  where.time = t;
  report.record(-err, where);
  report.details["lhs"] = lhs;
  report.details["rhs"] = rhs;
  report.details["relative_error"] = err;
  report.finalize();
  return report;
}

CheckReport check_variance_derivative(const SpectralDecomposition& dec, const GridFunction& f, double t,
                                      double tolerance, const FlowOptions& options) {
  if (!(t > 0.0)) throw ConfigError("check_variance_derivative requires t > 0");
  const double delta = std::min(default_step(dec, options), 0.5 * t);
  const double lhs =
      richardson_derivative([&](double s) { return variance(dec.measure(), dec.heat_apply(f, s)); }, t, delta);
  const double rhs = -2.0 * energy(dec.generator(), dec.heat_apply(f, t));
  const double err = std::abs(lhs) + std::abs(rhs) > 0.0 ? relative_error(lhs, rhs) : 0.0;
  CheckReport report("variance_derivative", tolerance);
  Location where;
  where.time = t;
  report.record(-err, where);
  report.details["lhs"] = lhs;
  report.details["rhs"] = rhs;
  report.details["relative_error"] = err;
  report.finalize();
  return report;
}

CheckReport check_entstar_derivative(const SpectralDecomposition& dec, const GridFunction& f, double t,
                                     const FlowOptions& options) {
  require_dim1(dec, "check_entstar_derivative");
  if (!(t > 0.0)) throw ConfigError("check_entstar_derivative requires t > 0");
  const Grid& grid = dec.grid();
  const auto& m = dec.measure();
  const double h = grid.spacing();
  const double delta = std::min(default_step(dec, options), 0.5 * t);
  const double mf2 = mean(m, f.array().square().matrix());

  const double lhs = -richardson_derivative([&](double s) { return ent_star(dec, f, s); }, t, delta);
  const GridFunction phi = dec.heat_apply(f, t);
  const GridFunction grad2 = gradient_norm(grid, phi).array().square();
  double rhs = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double phi2 = phi[i] * phi[i];
    const double log_term = phi2 > 0.0 ? std::log(phi2 / mf2) : 0.0;
    rhs += m.weights[i] * grad2[i] * (2.0 * log_term + 6.0);
  }

  const double err = std::abs(lhs) + std::abs(rhs) > 0.0 ? relative_error(lhs, rhs) : 0.0;
  CheckReport report("entstar_derivative", 10.0 * h * h);
  Location where;
  where.time = t;
  report.record(-err, where);
  report.details["lhs"] = lhs;
  report.details["rhs"] = rhs;
  report.details["relative_error"] = err;
  report.finalize();
  return report;
}

CheckReport check_rothaus(const WeightedMeasure& m, const GridFunction& f, double a, double tolerance) {
  const GridFunction f2 = f.array().square();
  const double mf = mean(m, f);
  const double ent_f2 = entropy(m, f2);
  CheckReport report("rothaus", tolerance);
  Location first;
  first.sample = 0;
  report.record(ent_f2 + 2.0 * mean(m, f2) - entropy(m, (f.array() + a).square().matrix()), first);
  Location second;
  second.sample = 1;
  report.record(entropy(m, (f.array() - mf).square().matrix()) + 2.0 * variance(m, f) - ent_f2, second);
  report.details["a"] = a;
  report.finalize();
  return report;
}

std::vector<FlowRow> flow_table(const SpectralDecomposition& dec, const GridFunction& f, double c,
                                const ConstantChain* chain, const std::vector<double>& times) {
  const bool with_phi = c > 0.0 && f.minCoeff() > 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<FlowRow> rows;
  rows.reserve(times.size());
  for (double t : times) {
    const auto th = theta_values(dec, f, t);
    const GridFunction pf = dec.heat_apply(f, t);
    rows.push_back({t, with_phi ? phi_functional(dec, f, c, t) : nan,
                    chain ? psi_functional(dec, f, *chain, t) : nan, th.ent_pf2, th.ent_star,
                    energy(dec.generator(), pf), th.theta1, th.theta2});
  }
  return rows;
}

}  // namespace lsi
