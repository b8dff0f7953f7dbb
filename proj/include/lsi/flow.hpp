#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lsi/certify.hpp"
#include "lsi/check_report.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

/// Sampled values of heat-flow functionals and their time derivatives.
struct FlowTrace {
  std::string name;
  std::vector<double> times;
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::vector<double>> derivatives;
  bool monotone = true;
  /// Largest derivative found (positive means increasing somewhere).
  double worst_slope = -std::numeric_limits<double>::infinity();
  double slope_tolerance = 0.0;
  /// Part of slope_tolerance due to rounding in the finite differences.
  double roundoff_floor = 0.0;
};

struct FlowOptions {
  /// Finite-difference step in t; <= 0 selects 1e-4 / nu_1.
  double fd_step = 0.0;
  /// Allowed positive slope relative to the functional's initial magnitude.
  double slope_tolerance = 1e-8;
};

/// d/dt F(t) by Richardson extrapolation of centered differences with steps
/// delta and delta/2 (one-sided when t < delta).
template <typename F>
double richardson_derivative(F&& fn, double t, double delta) {
  if (t >= delta) {
    const double d1 = (fn(t + delta) - fn(t - delta)) / (2.0 * delta);
    const double d2 = (fn(t + 0.5 * delta) - fn(t - 0.5 * delta)) / delta;
    return (4.0 * d2 - d1) / 3.0;
  }
  const double f0 = fn(t);
  const double d1 = (fn(t + delta) - f0) / delta;
  const double d2 = (fn(t + 0.5 * delta) - f0) / (0.5 * delta);
  return 2.0 * d2 - d1;
}

/// Phi(t) = 2 E[sqrt(P_t f)] - c Ent(P_t f).
double phi_functional(const SpectralDecomposition& dec, const GridFunction& f, double c, double t);

/// Ent*(phi^2) = mu(phi^2 log(phi^2 / mu f^2)) with phi = P_t f and the
/// reference mu f^2 of the initial f.
double ent_star(const SpectralDecomposition& dec, const GridFunction& f, double t);

/// Psi(t) = E[phi] + A Var(phi) - eta Ent*(phi^2) with phi = P_t f.
double psi_functional(const SpectralDecomposition& dec, const GridFunction& f,
                      const ConstantChain& chain, double t);

/// Phi at each time with derivatives; monotone iff every derivative is
/// <= slope_tolerance * |Phi(0)| + roundoff_floor, where the floor is
/// 8 eps S / delta and S bounds the sums that make up Phi. Throws ConfigError
/// unless f > 0.
FlowTrace trace_phi(const SpectralDecomposition& dec, const GridFunction& f, double c,
                    const std::vector<double>& times, const FlowOptions& options = {});

/// Psi for times >= chain.t0; monotone iff derivatives <= tol * |Psi(t0)| plus the
/// same kind of roundoff floor, and Psi stays >= -1e-8 at t0 and the last time. Throws ConfigError for t < t0.
FlowTrace trace_psi(const SpectralDecomposition& dec, const GridFunction& f, const ConstantChain& chain,
                    const std::vector<double>& times, const FlowOptions& options = {});

struct ThetaValues {
  double theta1 = 0.0;   // mu((P f^2 - (P f)^2) log((P f)^2 / mu f^2))
  double theta2 = 0.0;   // mu(P f^2 log(P f^2 / (P f)^2))
  double ent_pf2 = 0.0;  // Ent(P_t f^2)
  double ent_star = 0.0; // Ent*((P_t f)^2)
};

ThetaValues theta_values(const SpectralDecomposition& dec, const GridFunction& f, double t);

/// At t = chain.t0: C1 E[f] + C2 mu f^2 + C3 Var(f) - Theta1 >= -tol,
/// C4 E[f] - Theta2 >= -tol and C4 E[f] - (Ent(f^2) - Ent(P_t0 f^2)) >= -tol.
/// Margins divided by max(1, bound).
CheckReport theta_bounds(const SpectralDecomposition& dec, const GridFunction& f,
                         const ConstantChain& chain, double tolerance = 1e-8);

/// One-dimensional check of d/dt E[P_t f] = -2 mu(phi''^2) - 2 mu(V'' phi'^2)
/// with central differences over interior nodes. details: lhs, rhs,
/// relative_error. Passes iff relative error <= 10 h^2.
CheckReport check_energy_derivative(const SpectralDecomposition& dec, const PotentialSpec& p,
                                    const GridFunction& f, double t, const FlowOptions& options = {});

/// d/dt Var(P_t f) = -2 E[P_t f]; relative error must stay below tolerance.
CheckReport check_variance_derivative(const SpectralDecomposition& dec, const GridFunction& f, double t,
                                      double tolerance = 1e-6, const FlowOptions& options = {});

/// -d/dt Ent*((P_t f)^2) = 2 mu(|grad phi|^2 log(phi^2 / mu f^2)) + 6 mu |grad phi|^2
/// (dim 1, central differences). Passes iff relative error <= 10 h^2.
CheckReport check_entstar_derivative(const SpectralDecomposition& dec, const GridFunction& f, double t,
                                     const FlowOptions& options = {});

/// Both Rothaus forms: Ent((f + a)^2) <= Ent(f^2) + 2 mu f^2 and
/// Ent(f^2) <= Ent((f - mu f)^2) + 2 Var(f).
CheckReport check_rothaus(const WeightedMeasure& m, const GridFunction& f, double a,
                          double tolerance = 1e-10);

/// Rows for traces.csv: t, Phi, Psi, Ent_f2, Ent_star, Energy, Theta1, Theta2.
/// Phi is NaN unless f > 0 and c > 0; Psi is NaN without a chain.
struct FlowRow {
  double t, phi, psi, ent_f2, ent_star, energy, theta1, theta2;
};
std::vector<FlowRow> flow_table(const SpectralDecomposition& dec, const GridFunction& f, double c,
                                const ConstantChain* chain, const std::vector<double>& times);

}  // namespace lsi
