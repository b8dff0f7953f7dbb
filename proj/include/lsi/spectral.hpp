#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/Core>

#include "lsi/discretization.hpp"

namespace lsi {

enum class Backend { dense, iterative };

struct SpectralOptions {
  Backend backend = Backend::dense;
  /// Largest node count handled by the dense eigensolver.
  std::size_t dense_budget = 4096;
  /// Switch to the iterative backend instead of failing when over budget.
  bool allow_iterative_fallback = false;
  /// Number of low eigenpairs computed by the iterative backend.
  int iterative_modes = 16;
  /// Relative local error tolerance of the implicit-Euler heat stepper.
  double stepper_tolerance = 1e-9;
};

class HeatStepper;

/// Eigenpairs of -L, mu-orthonormal, in ascending order. The dense backend
/// holds the full spectrum and applies P_t exactly by spectral synthesis; the
/// iterative backend holds a few low modes and applies P_t by adaptive
/// implicit Euler.
class SpectralDecomposition {
 public:
  SpectralDecomposition(std::shared_ptr<const Generator> gen, Backend backend,
                        Eigen::VectorXd eigenvalues, Eigen::MatrixXd symmetric_vectors,
                        double stepper_tolerance);
  ~SpectralDecomposition();
  SpectralDecomposition(const SpectralDecomposition&);
  SpectralDecomposition& operator=(const SpectralDecomposition&) = delete;

  Backend backend() const { return backend_; }
  const Generator& generator() const { return *gen_; }
  const WeightedMeasure& measure() const { return gen_->measure(); }
  const Grid& grid() const { return gen_->grid(); }
  std::size_t size() const { return gen_->size(); }

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  int mode_count() const { return static_cast<int>(eigenvalues_.size()); }
  /// k-th mu-orthonormal eigenfunction.
  GridFunction mode(int k) const;

  /// P_t f. t = 0 returns f unchanged; the mean is carried exactly so that
  /// P_t 1 = 1 and mu(P_t f) = mu(f).
  GridFunction heat_apply(const GridFunction& f, double t) const;

 private:
  std::shared_ptr<const Generator> gen_;
  Backend backend_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd vectors_;  // Euclidean-orthonormal eigenvectors of D(-L)D^{-1}
  Eigen::VectorXd sqrt_mu_;
  double stepper_tolerance_;
  std::unique_ptr<HeatStepper> stepper_;
};

/// Throws ConfigError when the grid is over the dense budget and no fallback
/// is allowed, NumericalError when the eigensolve fails or the kernel of -L is
/// not the constants.
SpectralDecomposition decompose(const Generator& gen, const SpectralOptions& options = {});

/// nu_1; throws NumericalError when nu_1 <= 1e-10.
double spectral_gap(const SpectralDecomposition& dec);

/// Throws ConfigError for t < 0.
GridFunction heat_apply(const SpectralDecomposition& dec, const GridFunction& f, double t);

}  // namespace lsi
