#include "lsi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include "lsi/error.hpp"

namespace lsi {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Adaptive implicit Euler for the symmetrized flow dy/dt = -S y, with step
/// doubling for the local error estimate and Richardson extrapolation of the
/// accepted step. Factorizations are cached by step size.
class HeatStepper {
 public:
  HeatStepper(SparseMatrix s, double tolerance) : s_(std::move(s)), tolerance_(tolerance) {}

  Eigen::VectorXd advance(Eigen::VectorXd y, double t) const {
    double done = 0.0;
    // Steps are powers of two so that factorizations are reused across calls.
    int exponent = -10;
    while (done < t) {
      const double remaining = t - done;
      double tau = std::ldexp(1.0, exponent);
      const bool last = tau >= remaining;
      if (last) tau = remaining;
      const Eigen::VectorXd full = solve(tau, y);
      const Eigen::VectorXd half = solve(0.5 * tau, solve(0.5 * tau, y));
      const double err = (half - full).norm();
      const double scale = std::max(y.norm(), 1e-300);
      if (err <= tolerance_ * scale || tau < 1e-12) {
        y = 2.0 * half - full;
        done = last ? t : done + tau;
        if (err < 0.125 * tolerance_ * scale && exponent < 6) ++exponent;
      } else {
        --exponent;
        if (last) exponent = std::min(exponent, static_cast<int>(std::floor(std::log2(remaining))));
      }
    }
    return y;
  }

 private:
  Eigen::VectorXd solve(double tau, const Eigen::VectorXd& rhs) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(tau);
    if (it == cache_.end()) {
      if (cache_.size() > 48) cache_.clear();
      SparseMatrix a(s_.rows(), s_.cols());
      a.setIdentity();
      a += tau * s_;
      auto solver = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(a);
      if (solver->info() != Eigen::Success) throw NumericalError("implicit Euler factorization failed");
      it = cache_.emplace(tau, std::move(solver)).first;
    }
    return it->second->solve(rhs);
  }

  SparseMatrix s_;
  double tolerance_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>>> cache_;
};

SpectralDecomposition::SpectralDecomposition(std::shared_ptr<const Generator> gen, Backend backend,
                                             Eigen::VectorXd eigenvalues,
                                             Eigen::MatrixXd symmetric_vectors,
                                             double stepper_tolerance)
    : gen_(std::move(gen)), backend_(backend), eigenvalues_(std::move(eigenvalues)),
      vectors_(std::move(symmetric_vectors)),
      sqrt_mu_(gen_->measure().weights.array().sqrt()), stepper_tolerance_(stepper_tolerance) {
  if (backend_ == Backend::iterative) {
    stepper_ = std::make_unique<HeatStepper>(gen_->symmetrized_negative(), stepper_tolerance_);
  }
}

SpectralDecomposition::~SpectralDecomposition() = default;

SpectralDecomposition::SpectralDecomposition(const SpectralDecomposition& other)
    : gen_(other.gen_), backend_(other.backend_), eigenvalues_(other.eigenvalues_),
      vectors_(other.vectors_), sqrt_mu_(other.sqrt_mu_),
      stepper_tolerance_(other.stepper_tolerance_) {
  if (backend_ == Backend::iterative) {
    stepper_ = std::make_unique<HeatStepper>(gen_->symmetrized_negative(), stepper_tolerance_);
  }
}

GridFunction SpectralDecomposition::mode(int k) const {
  if (k < 0 || k >= mode_count()) throw ConfigError("mode index out of range");
  return vectors_.col(k).array() / sqrt_mu_.array();
}

GridFunction SpectralDecomposition::heat_apply(const GridFunction& f, double t) const {
  if (t < 0.0 || !std::isfinite(t)) throw ConfigError("heat_apply requires t >= 0");
  if (f.size() != sqrt_mu_.size()) throw ConfigError("heat_apply: size mismatch");
  if (t == 0.0) return f;

  const double mf = mean(measure(), f);
  const Eigen::VectorXd y = sqrt_mu_.array() * (f.array() - mf);
  Eigen::VectorXd evolved;
  if (backend_ == Backend::dense) {
    // Modes with t nu > 40 contribute below e^{-40} relative; dropping them
    // also keeps denormals out of the products.
    Eigen::Index n = 0;
    while (n + 1 < vectors_.cols() && t * eigenvalues_[n + 1] <= 40.0) ++n;
    const auto upper = vectors_.middleCols(1, n);
    Eigen::VectorXd coeff = upper.transpose() * y;
    coeff.array() *= (-t * eigenvalues_.segment(1, n).array()).exp();
    evolved = upper * coeff;
  } else {
    evolved = stepper_->advance(y, t);
  }
  return (evolved.array() / sqrt_mu_.array() + mf).matrix();
}

namespace {

// Orders eigenpairs, fixes signs and checks the kernel of -L.
void normalize_pairs(Eigen::VectorXd& values, Eigen::MatrixXd& vectors, const Eigen::VectorXd& sqrt_mu) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    Eigen::Index arg = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, k) < 0.0) vectors.col(k) *= -1.0;
  }
  if (std::abs(values[0]) > 1e-10) {
    throw NumericalError("smallest eigenvalue of -L is " + std::to_string(values[0]) +
                         ", expected 0 (assembly error)");
  }
  if (std::abs(std::abs(vectors.col(0).dot(sqrt_mu)) - 1.0) > 1e-8) {
    throw NumericalError("ground mode of -L is not constant");
  }
}

SpectralDecomposition dense_decompose(const Generator& gen, const SpectralOptions& options) {
  const auto sym = gen.symmetrized_negative();
  const auto n = static_cast<lapack_int>(gen.size());
  Eigen::VectorXd values(n);
  Eigen::MatrixXd vectors(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  lapack_int info = 0;

  if (gen.grid().dim() == 1) {
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off = Eigen::VectorXd::Zero(std::max<lapack_int>(n - 1, 1));
    for (lapack_int i = 0; i < n; ++i) diag[i] = sym.coeff(i, i);
    for (lapack_int i = 0; i + 1 < n; ++i) off[i] = sym.coeff(i + 1, i);
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), off.data(), 0.0, 0.0, 0, 0,
                          0.0, &found, values.data(), vectors.data(), n, support.data());
  } else {
    Eigen::MatrixXd a = Eigen::MatrixXd(sym);
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, a.data(), n, 0.0, 0.0, 0, 0, 0.0,
                          &found, values.data(), vectors.data(), n, support.data());
  }
  if (info != 0 || found != n) {
    throw NumericalError("dense eigensolve failed (LAPACK info " + std::to_string(info) + ")");
  }
  const Eigen::VectorXd sqrt_mu = gen.measure().weights.array().sqrt();
  normalize_pairs(values, vectors, sqrt_mu);
  return SpectralDecomposition(std::make_shared<const Generator>(gen), Backend::dense,
                               std::move(values), std::move(vectors), options.stepper_tolerance);
}

// Inverse subspace iteration on S + shift I with Rayleigh-Ritz projection.
SpectralDecomposition iterative_decompose(const Generator& gen, const SpectralOptions& options) {
  const auto s = gen.symmetrized_negative();
  const auto n = static_cast<Eigen::Index>(gen.size());
  const int wanted = static_cast<int>(std::min<Eigen::Index>(options.iterative_modes, n));
  if (wanted < 2) throw ConfigError("iterative backend needs at least 2 modes");
  const Eigen::Index block = std::min<Eigen::Index>(n, 2 * wanted + 4);

  const double shift = 1e-3;
  SparseMatrix shifted = s;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) throw NumericalError("shifted factorization failed");

  const Eigen::VectorXd sqrt_mu = gen.measure().weights.array().sqrt();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < block; ++k) x(i, k) = normal(rng);
  x.col(0) = sqrt_mu;

  Eigen::VectorXd ritz;
  Eigen::MatrixXd basis;
  bool converged = false;
  for (int iter = 0; iter < 2000 && !converged; ++iter) {
    Eigen::MatrixXd y(n, block);
    for (Eigen::Index k = 0; k < block; ++k) y.col(k) = solver.solve(x.col(k));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    const Eigen::MatrixXd sq = s * q;
    const Eigen::MatrixXd projected = q.transpose() * sq;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (projected + projected.transpose()));
    ritz = small.eigenvalues();
    basis = q * small.eigenvectors();
    const Eigen::MatrixXd residual = sq * small.eigenvectors() - basis * ritz.asDiagonal();
    converged = true;
    for (int k = 0; k < wanted; ++k) {
      if (residual.col(k).norm() > 1e-9 * std::max(1.0, ritz[k])) converged = false;
    }
    x = basis;
  }
  if (!converged) throw NumericalError("iterative eigensolve did not converge");

  Eigen::VectorXd values = ritz.head(wanted);
  Eigen::MatrixXd vectors = basis.leftCols(wanted);
  normalize_pairs(values, vectors, sqrt_mu);
  return SpectralDecomposition(std::make_shared<const Generator>(gen), Backend::iterative,
                               std::move(values), std::move(vectors), options.stepper_tolerance);
}

}  // namespace

SpectralDecomposition decompose(const Generator& gen, const SpectralOptions& options) {
  Backend backend = options.backend;
  if (backend == Backend::dense && gen.size() > options.dense_budget) {
    if (!options.allow_iterative_fallback) {
      throw ConfigError("grid has " + std::to_string(gen.size()) +
                        " nodes, above the dense eigensolve budget of " +
                        std::to_string(options.dense_budget));
    }
    backend = Backend::iterative;
  }
  return backend == Backend::dense ? dense_decompose(gen, options) : iterative_decompose(gen, options);
}

double spectral_gap(const SpectralDecomposition& dec) {
  if (dec.mode_count() < 2) throw NumericalError("decomposition holds a single mode");
  const double gap = dec.eigenvalues()[1];
  if (!(gap > 1e-10)) throw NumericalError("spectral gap vanishes: generator graph is disconnected");
  return gap;
}

GridFunction heat_apply(const SpectralDecomposition& dec, const GridFunction& f, double t) {
  return dec.heat_apply(f, t);
}

}  // namespace lsi
