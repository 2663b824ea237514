#pragma once

#include <cstdint>

#include "pacmoo/gp.hpp"

namespace pacmoo {

/// Deterministic function f(x) = offset + scale_out * sqrt(2 s / m) * sum_i theta_i
/// cos(omega_i . u(x) + b_i), where u maps x into the parent model's unit cube.
class SampledFunction {
 public:
  SampledFunction(Matrix omega, Vector phase, Vector weights, double signal_variance,
                  Bounds input_box, double offset = 0.0, double output_scale = 1.0);

  double operator()(const Vector& x) const;
  /// Row-wise batch evaluation.
  Vector evaluate(const Matrix& x) const;

  Index num_features() const { return omega_.rows(); }
  const Matrix& omega() const { return omega_; }
  const Vector& phase() const { return phase_; }
  const Vector& weights() const { return weights_; }
  /// sqrt(2 * signal_variance / m).
  double feature_scale() const { return feature_scale_; }

 private:
  Matrix omega_;  // m x d, acts on unit-cube inputs
  Vector phase_;
  Vector weights_;
  double feature_scale_;
  Bounds box_;
  double offset_;
  double output_scale_;
};

/// Draws an approximate posterior sample of the model's latent function: frequencies from the
/// SE spectral density, weights from the Bayesian linear-model posterior given the model's
/// training data (prior draw when it has none). Values are in the model's output units.
SampledFunction sample_posterior_function(const GpModel& model, int num_features,
                                          std::uint64_t seed);

/// Cosine feature matrix (rows = points) used by a sample; exposed for tests.
Matrix fourier_features(const SampledFunction& fn, const Matrix& x_unit);

}  // namespace pacmoo
