#include "pacmoo/rff.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

namespace pacmoo {

SampledFunction::SampledFunction(Matrix omega, Vector phase, Vector weights,
                                 double signal_variance, Bounds input_box, double offset,
                                 double output_scale)
    : omega_(std::move(omega)),
      phase_(std::move(phase)),
      weights_(std::move(weights)),
      feature_scale_(0.0),
      box_(std::move(input_box)),
      offset_(offset),
      output_scale_(output_scale) {
  if (omega_.rows() < 1) throw UsageError("SampledFunction: at least one feature required");
  if (phase_.size() != omega_.rows() || weights_.size() != omega_.rows()) {
    throw UsageError("SampledFunction: feature count mismatch");
  }
  if (omega_.cols() != box_.dim()) throw UsageError("SampledFunction: dimension mismatch");
  feature_scale_ = std::sqrt(2.0 * signal_variance / static_cast<double>(omega_.rows()));
}

Matrix fourier_features(const SampledFunction& fn, const Matrix& x_unit) {
  Matrix arg = x_unit * fn.omega().transpose();
  arg.rowwise() += fn.phase().transpose();
  return fn.feature_scale() * arg.array().cos().matrix();
}

Vector SampledFunction::evaluate(const Matrix& x) const {
  const Vector inv_width = box_.width().cwiseInverse();
  const Matrix xu = (x.rowwise() - box_.lower.transpose()) * inv_width.asDiagonal();
  const Vector latent = fourier_features(*this, xu) * weights_;
  return (offset_ + output_scale_ * latent.array()).matrix();
}

double SampledFunction::operator()(const Vector& x) const {
  const Vector u = box_.to_unit(x);
  double acc = 0.0;
  for (Index i = 0; i < omega_.rows(); ++i) {
    acc += weights_[i] * std::cos(omega_.row(i).dot(u) + phase_[i]);
  }
  return offset_ + output_scale_ * feature_scale_ * acc;
}

SampledFunction sample_posterior_function(const GpModel& model, int num_features,
                                          std::uint64_t seed) {
  if (num_features < 1) throw UsageError("sample_posterior_function: num_features must be >= 1");
  const KernelParams& params = model.params();
  const Index d = model.dim();
  const Index m = num_features;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  Matrix omega(m, d);
  for (Index i = 0; i < m; ++i) {
    for (Index k = 0; k < d; ++k) omega(i, k) = normal(rng) / params.lengthscales[k];
  }
  Vector phase(m);
  for (Index i = 0; i < m; ++i) phase[i] = angle(rng);
  Vector z(m);
  for (Index i = 0; i < m; ++i) z[i] = normal(rng);

  SampledFunction prior_fn(omega, phase, z, params.signal_variance, model.input_box(),
                           model.y_mean(), model.y_scale());
  if (model.num_train() == 0) return prior_fn;

  // Weight posterior with prior N(0, I) and Gaussian likelihood of noise variance s2:
  // A = Phi^T Phi + s2 I, mean = A^{-1} Phi^T y, cov = s2 A^{-1}.
  const double s2 = params.noise_variance + model.jitter();
  const Matrix phi = fourier_features(prior_fn, model.train_unit());
  Matrix a = phi.transpose() * phi;
  a.diagonal().array() += s2;
  Matrix lower;
  robust_cholesky(a, lower);
  const auto tri = std::as_const(lower).triangularView<Eigen::Lower>();
  const Vector mean = tri.transpose().solve(tri.solve(phi.transpose() * model.train_standardized()));
  const Vector weights = mean + std::sqrt(s2) * tri.transpose().solve(z);

  return SampledFunction(std::move(omega), std::move(phase), weights, params.signal_variance,
                         model.input_box(), model.y_mean(), model.y_scale());
}

}  // namespace pacmoo
