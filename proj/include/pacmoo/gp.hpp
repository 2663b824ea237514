#pragma once

#include <cstdint>
#include <optional>

#include "pacmoo/core.hpp"

namespace pacmoo {

/// Squared-exponential kernel hyperparameters, expressed for unit-cube inputs and
/// standardized targets.
struct KernelParams {
  Vector lengthscales;
  double signal_variance = 1.0;
  double noise_variance = 1e-6;
};

/// k(a, b) = signal_variance * exp(-0.5 * sum_k ((a_k - b_k) / l_k)^2) for unit-cube inputs.
double se_kernel(const KernelParams& params, const Vector& a, const Vector& b);

/// Gram matrix between the rows of a and the rows of b.
Matrix se_kernel_matrix(const KernelParams& params, const Matrix& a, const Matrix& b);

struct GpFitOptions {
  int restarts = 3;
  bool ard = true;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  /// Used as the first optimizer start when present (typically last iteration's fit).
  std::optional<KernelParams> warm_start;
};

struct Prediction {
  double mean;
  double stddev;
};

/// Exact GP regression on one output. Inputs are mapped to the unit cube and targets are
/// standardized internally; predictions come back in the original units and include the
/// observation noise.
class GpModel {
 public:
  static constexpr double kNoiseFloor = 1e-6;
  static constexpr double kStddevFloor = 1e-9;

  /// Maximizes the log marginal likelihood over hyperparameters with multi-start L-BFGS.
  /// Requires n >= 2 finite targets and no duplicate rows (see deduplicate).
  static GpModel fit(const Matrix& x, const Vector& y, const Bounds& input_box,
                     const GpFitOptions& options = {});

  /// Conditions on data with fixed hyperparameters.
  static GpModel condition(const KernelParams& params, const Matrix& x, const Vector& y,
                           const Bounds& input_box);

  /// Model with no data; predictions follow the zero-mean prior.
  static GpModel prior(const KernelParams& params, const Bounds& input_box);

  Prediction predict(const Vector& x) const;
  /// Row-wise batch prediction.
  void predict(const Matrix& x, Vector& mean, Vector& stddev) const;

  const KernelParams& params() const { return params_; }
  const Bounds& input_box() const { return box_; }
  Index num_train() const { return train_unit_.rows(); }
  Index dim() const { return box_.dim(); }
  /// Training inputs mapped to the unit cube.
  const Matrix& train_unit() const { return train_unit_; }
  /// Standardized training targets.
  const Vector& train_standardized() const { return train_std_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  /// Lower Cholesky factor of K + (noise + jitter) I in standardized units.
  const Matrix& gram_factor() const { return chol_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }

 private:
  GpModel() = default;
  void condition_in_place();

  KernelParams params_;
  Bounds box_;
  Matrix train_unit_;
  Vector train_std_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Matrix chol_;
  Vector alpha_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

/// Log marginal likelihood of standardized targets under params, and optionally its
/// gradient with respect to (log lengthscales, log signal variance, log noise variance).
/// With a shared lengthscale the gradient has a single lengthscale entry.
double log_marginal_likelihood(const KernelParams& params, const Matrix& x_unit,
                               const Vector& y_std, Vector* gradient = nullptr,
                               bool shared_lengthscale = false);

/// Merges rows closer than tol in the infinity norm, averaging their targets.
void deduplicate(Matrix& x, Vector& y, double tol = 1e-10);

/// Cholesky with adaptive diagonal jitter (1e-10 growing x10 up to 1e-4). Returns the jitter
/// used; throws NumericalError when every level fails.
double robust_cholesky(const Matrix& a, Matrix& lower);

}  // namespace pacmoo
