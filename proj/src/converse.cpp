#include "lsi/converse.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include "lsi/parallel.hpp"

namespace lsi {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kMaxExponent = 700.0;
constexpr std::size_t kDenseLimit = 4096;

// diag(w) H, symmetric with nonpositive off-diagonal entries.
SparseMatrix weighted_operator(const Generator& gen, const GridFunction& phi) {
  const GridFunction& w = gen.node_weights();
  SparseMatrix m = -(w.asDiagonal() * gen.matrix());
  for (Eigen::Index i = 0; i < phi.size(); ++i) m.coeffRef(i, i) += w[i] * phi[i];
  m.makeCompressed();
  return m;
}

GridFunction apply_h(const Generator& gen, const GridFunction& phi, const GridFunction& u) {
  return -gen.apply(u) + phi.cwiseProduct(u);
}

double h_norm_inf(const Generator& gen, const GridFunction& phi) {
  GridFunction rows = phi.cwiseAbs();
  const SparseMatrix& l = gen.matrix();
  for (Eigen::Index k = 0; k < l.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(l, k); it; ++it) {
      if (it.row() == it.col()) {
        rows[it.row()] += std::abs(-it.value() + phi[it.row()]) - std::abs(phi[it.row()]);
      } else {
        rows[it.row()] += std::abs(it.value());
      }
    }
  }
  return rows.maxCoeff();
}

// Largest ratio summand(boundary) / summand(inward neighbour) over boundary nodes.
double tail_summand_ratio(const Grid& grid, const GridFunction& summand) {
  const int n = grid.points_per_axis();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.is_boundary(i)) continue;
    std::size_t stride = 1;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const int k = grid.axis_index(i, axis);
      std::size_t inward = i;
      if (k == 0) inward = i + stride;
      if (k == n - 1) inward = i - stride;
      if (inward != i && summand[static_cast<Eigen::Index>(inward)] > 0.0) {
        worst = std::max(worst, summand[static_cast<Eigen::Index>(i)] / summand[static_cast<Eigen::Index>(inward)]);
      }
      stride *= static_cast<std::size_t>(n);
    }
  }
  return worst;
}

}  // namespace

SchroedingerProblem schroedinger_potential(const Generator& gen, const Point& x0, double rho, double c) {
  if (!(rho > 0.0)) throw ConfigError("converse: rho must be positive");
  if (!(c > 0.0)) throw ConfigError("converse: c must be positive");
  if (x0.size() != gen.grid().dim()) throw ConfigError("converse: x0 has the wrong dimension");
  SchroedingerProblem prob;
  prob.rho = rho;
  prob.c = c;
  prob.x0 = x0;
  prob.d2 = gen.grid().squared_distances(x0);
  if (c * prob.d2.maxCoeff() > kMaxExponent) {
    throw NumericalError("converse: e^{c d^2} overflows on the grid; reduce c or the radius");
  }
  const GridFunction summand = gen.measure().weights.array() * (c * prob.d2.array()).exp();
  prob.b = 2.0 * summand.sum();
  prob.phi = rho * (prob.b - c * prob.d2.array());
  prob.tail_ratio = tail_summand_ratio(gen.grid(), summand);
  prob.tail_decreasing = prob.tail_ratio < 1.0 - 1e-9;
  return prob;
}

double smallest_eigenvalue(const Generator& gen, const SchroedingerProblem& prob) {
  SparseMatrix s = gen.symmetrized_negative();
  for (Eigen::Index i = 0; i < prob.phi.size(); ++i) s.coeffRef(i, i) += prob.phi[i];
  const auto n = static_cast<lapack_int>(gen.size());
  double value = 0.0;
  lapack_int found = 0;
  lapack_int info = 0;
  std::vector<lapack_int> support(2);
  if (gen.grid().dim() == 1) {
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off = Eigen::VectorXd::Zero(std::max<lapack_int>(n - 1, 1));
    for (lapack_int i = 0; i < n; ++i) diag[i] = s.coeff(i, i);
    for (lapack_int i = 0; i + 1 < n; ++i) off[i] = s.coeff(i + 1, i);
    double z = 0.0;
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1, 1, 0.0,
                          &found, &value, &z, 1, support.data());
  } else if (gen.size() <= kDenseLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd(s);
    double z = 0.0;
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, 1, 0.0, &found,
                          &value, &z, 1, support.data());
  } else {
    // Sylvester inertia: the smallest LDLT pivot carries the sign of lambda_min.
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(s);
    if (ldlt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    return ldlt.vectorD().minCoeff();
  }
  if (info != 0 || found != 1) {
    throw NumericalError("converse: eigensolve of -L + phi failed (LAPACK info " + std::to_string(info) + ")");
  }
  return value;
}

ConverseResult solve_lyapunov_from_lsi(const Generator& gen, const SchroedingerProblem& prob,
                                       double residual_tol) {
  ConverseResult out;
  out.problem = prob;
  out.lambda_min = smallest_eigenvalue(gen, prob);
  if (!(out.lambda_min > 0.0)) {
    throw IndefiniteOperator("converse: operator -L + phi is indefinite (smallest eigenvalue " +
                                 std::to_string(out.lambda_min) + ", rho " + std::to_string(prob.rho) +
                                 ", c " + std::to_string(prob.c) + ")",
                             out.lambda_min);
  }

  const GridFunction& w = gen.node_weights();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(weighted_operator(gen, prob.phi));
  if (ldlt.info() != Eigen::Success) throw NumericalError("converse: factorization of H failed");

  const GridFunction ones = GridFunction::Ones(static_cast<Eigen::Index>(gen.size()));
  const double h_norm = h_norm_inf(gen, prob.phi);
  GridFunction u = ldlt.solve(w);
  auto residual = [&](const GridFunction& r) {
    return r.cwiseAbs().maxCoeff() / (u.cwiseAbs().maxCoeff() * h_norm);
  };
  GridFunction r = ones - apply_h(gen, prob.phi, u);
  out.residual = residual(r);
  for (int step = 0; step < 5 && out.residual > residual_tol; ++step) {
    u += ldlt.solve(w.cwiseProduct(r));
    r = ones - apply_h(gen, prob.phi, u);
    out.residual = residual(r);
    out.refinement_steps = step + 1;
  }
  if (!(out.residual <= residual_tol)) {
    throw NumericalError("converse: residual " + std::to_string(out.residual) + " above tolerance");
  }
  if (!(u.minCoeff() > 0.0)) {
    throw NumericalError("converse: solution of Hu = 1 is not positive (min " + std::to_string(u.minCoeff()) + ")");
  }
  out.u = u;
  out.certificate = evaluate_lyapunov(gen, u, prob.rho * prob.c, prob.rho * prob.b, prob.x0);
  return out;
}

CheckReport coercivity_check(const Generator& gen, const SchroedingerProblem& prob, const GridFunction& u,
                             double tolerance) {
  const auto& m = gen.measure();
  const double e = energy(gen, u);
  const double form = inner(m, u, apply_h(gen, prob.phi, u));
  const double reference = e + prob.rho * prob.b * mean(m, u.array().square().matrix());
  const double scale = reference > 0.0 ? reference : 1.0;

  CheckReport report("coercivity", tolerance);
  Location lower;
  lower.sample = 0;
  report.record((form - 0.5 * reference) / scale, lower);
  Location upper;
  upper.sample = 1;
  report.record((reference - form) / scale, upper);
  report.details["u_h_u"] = form;
  report.details["energy"] = e;
  report.details["reference"] = reference;
  report.finalize();
  return report;
}

std::vector<double> default_converse_ladder(double rho) {
  std::vector<double> out;
  for (int k = -1; k <= 4; ++k) out.push_back(std::ldexp(rho, k));
  return out;
}

ConverseScan scan_converse_ladder(const Generator& gen, const Point& x0, double rho,
                                  const std::vector<double>& ladder) {
  if (!(rho > 0.0)) throw ConfigError("converse: rho must be positive");
  ConverseScan scan;
  scan.entries.resize(ladder.size());
  const double max_d2 = gen.grid().squared_distances(x0).maxCoeff();
  parallel_for(ladder.size(), [&](std::size_t k) {
    auto& entry = scan.entries[k];
    entry.c = ladder[k];
    if (!(entry.c > 0.0)) {
      entry.skipped = "nonpositive c";
      return;
    }
    if (entry.c * max_d2 > kMaxExponent) {
      entry.skipped = "overflow";
      return;
    }
    const auto prob = schroedinger_potential(gen, x0, rho, entry.c);
    entry.b = prob.b;
    entry.tail_decreasing = prob.tail_decreasing;
    if (!prob.tail_decreasing) {
      entry.skipped = "tail summand not decreasing";
      return;
    }
    entry.lambda_min = smallest_eigenvalue(gen, prob);
    entry.accepted = entry.lambda_min > 0.0;
  });
  for (std::size_t k = 0; k < scan.entries.size(); ++k) {
    if (!scan.entries[k].accepted) continue;
    if (scan.best < 0 || scan.entries[k].c > scan.entries[static_cast<std::size_t>(scan.best)].c) {
      scan.best = static_cast<int>(k);
    }
  }
  return scan;
}

ConstantChain converse_chain(const SpectralDecomposition& dec, const PotentialSpec& p,
                             const ConverseResult& result, double t0) {
  const auto curvature = curvature_lower_bound(p, dec.grid().radius());
  const double K = std::max(curvature.K, kMinChainCurvature);
  const double mu0 = base_point_mass(dec.measure(), dec.grid(), result.problem.x0, K);
  return constant_chain(result.certificate, K, spectral_gap(dec), mu0, t0);
}

}  // namespace lsi
