#include "pacmoo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

#include "pacmoo/lbfgs.hpp"

namespace pacmoo {

namespace {

constexpr double kMinLengthscale = 1e-3;
constexpr double kMaxLengthscale = 1e3;
constexpr double kMinSignal = 1e-3;
constexpr double kMaxSignal = 1e3;
constexpr double kMaxNoise = 1.0;

Matrix scaled_rows(const Matrix& x, const Vector& lengthscales) {
  return x * lengthscales.cwiseInverse().asDiagonal();
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix d = (-2.0 * a * b.transpose()).colwise() + an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

Matrix to_unit_rows(const Bounds& box, const Matrix& x) {
  const Vector inv_width = box.width().cwiseInverse();
  return (x.rowwise() - box.lower.transpose()) * inv_width.asDiagonal();
}

// Optimizer coordinates: log lengthscales (d or 1), log signal variance, log noise variance.
Vector pack(const KernelParams& p, bool shared) {
  const Index nl = shared ? 1 : p.lengthscales.size();
  Vector u(nl + 2);
  if (shared) {
    u[0] = std::log(p.lengthscales.mean());
  } else {
    u.head(nl) = p.lengthscales.array().log().matrix();
  }
  u[nl] = std::log(p.signal_variance);
  u[nl + 1] = std::log(p.noise_variance);
  return u;
}

KernelParams unpack(const Vector& u, Index dim, bool shared) {
  const Index nl = shared ? 1 : dim;
  KernelParams p;
  p.lengthscales = shared ? Vector::Constant(dim, std::exp(u[0]))
                          : Vector(u.head(nl).array().exp().matrix());
  p.signal_variance = std::exp(u[nl]);
  p.noise_variance = std::exp(u[nl + 1]);
  return p;
}

}  // namespace

double se_kernel(const KernelParams& params, const Vector& a, const Vector& b) {
  const double r2 = ((a - b).array() / params.lengthscales.array()).square().sum();
  return params.signal_variance * std::exp(-0.5 * r2);
}

Matrix se_kernel_matrix(const KernelParams& params, const Matrix& a, const Matrix& b) {
  const Matrix d = squared_distances(scaled_rows(a, params.lengthscales),
                                     scaled_rows(b, params.lengthscales));
  return params.signal_variance * (-0.5 * d.array()).exp().matrix();
}

double robust_cholesky(const Matrix& a, Matrix& lower) {
  const Index n = a.rows();
  double jitter = 0.0;
  while (true) {
    Eigen::LLT<Matrix> llt(a + jitter * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      lower = llt.matrixL();
      return jitter;
    }
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-4 * (1.0 + 1e-9)) {
      throw NumericalError("Cholesky factorization failed after jitter escalation");
    }
  }
}

double log_marginal_likelihood(const KernelParams& params, const Matrix& x_unit,
                               const Vector& y_std, Vector* gradient, bool shared_lengthscale) {
  const Index n = x_unit.rows();
  const Index d = x_unit.cols();
  const Matrix k_se = se_kernel_matrix(params, x_unit, x_unit);
  Matrix lower;
  robust_cholesky(k_se + params.noise_variance * Matrix::Identity(n, n), lower);
  const auto tri = std::as_const(lower).triangularView<Eigen::Lower>();
  const Vector alpha = tri.transpose().solve(tri.solve(y_std));
  const double lml = -0.5 * y_std.dot(alpha) - lower.diagonal().array().log().sum() -
                     0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (gradient == nullptr) return lml;

  const Matrix k_inv = tri.transpose().solve(tri.solve(Matrix::Identity(n, n)));
  const Matrix w = alpha * alpha.transpose() - k_inv;
  const Matrix wk = w.cwiseProduct(k_se);
  const Index nl = shared_lengthscale ? 1 : d;
  gradient->setZero(nl + 2);
  for (Index k = 0; k < d; ++k) {
    const Vector col = x_unit.col(k);
    const Matrix diff2 = (col.replicate(1, n) - col.transpose().replicate(n, 1)).array().square();
    const double l2 = params.lengthscales[k] * params.lengthscales[k];
    (*gradient)[shared_lengthscale ? 0 : k] += 0.5 * wk.cwiseProduct(diff2).sum() / l2;
  }
  (*gradient)[nl] = 0.5 * wk.sum();
  (*gradient)[nl + 1] = 0.5 * params.noise_variance * w.trace();
  return lml;
}

void deduplicate(Matrix& x, Vector& y, double tol) {
  std::vector<Index> owner(x.rows(), -1);
  std::vector<Index> kept;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j : kept) {
      if ((x.row(i) - x.row(j)).lpNorm<Eigen::Infinity>() <= tol) {
        owner[i] = j;
        break;
      }
    }
    if (owner[i] < 0) {
      owner[i] = i;
      kept.push_back(i);
    }
  }
  if (kept.size() == static_cast<std::size_t>(x.rows())) return;
  Matrix xo(kept.size(), x.cols());
  Vector yo = Vector::Zero(kept.size());
  Vector count = Vector::Zero(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) xo.row(r) = x.row(kept[r]);
  for (Index i = 0; i < x.rows(); ++i) {
    const auto r = std::find(kept.begin(), kept.end(), owner[i]) - kept.begin();
    yo[r] += y[i];
    count[r] += 1.0;
  }
  x = xo;
  y = yo.cwiseQuotient(count);
}

GpModel GpModel::prior(const KernelParams& params, const Bounds& input_box) {
  GpModel m;
  m.params_ = params;
  m.box_ = input_box;
  m.train_unit_.resize(0, input_box.dim());
  m.train_std_.resize(0);
  return m;
}

GpModel GpModel::condition(const KernelParams& params, const Matrix& x, const Vector& y,
                           const Bounds& input_box) {
  if (x.rows() != y.size()) throw UsageError("GpModel: x and y row counts differ");
  if (x.cols() != input_box.dim()) throw UsageError("GpModel: input dimension mismatch");
  if (!y.allFinite() || !x.allFinite()) throw DataError("GpModel: non-finite training data");
  GpModel m;
  m.params_ = params;
  m.params_.noise_variance = std::max(params.noise_variance, kNoiseFloor);
  m.box_ = input_box;
  m.train_unit_ = to_unit_rows(input_box, x);
  m.y_mean_ = y.size() > 0 ? y.mean() : 0.0;
  const double sd =
      y.size() > 0 ? std::sqrt((y.array() - m.y_mean_).square().mean()) : 0.0;
  m.y_scale_ = sd > 1e-12 * (1.0 + std::abs(m.y_mean_)) ? sd : 1.0;
  m.train_std_ = (y.array() - m.y_mean_) / m.y_scale_;
  m.condition_in_place();
  return m;
}

void GpModel::condition_in_place() {
  const Index n = train_unit_.rows();
  if (n == 0) return;
  const Matrix k = se_kernel_matrix(params_, train_unit_, train_unit_) +
                   params_.noise_variance * Matrix::Identity(n, n);
  jitter_ = robust_cholesky(k, chol_);
  const auto tri = std::as_const(chol_).triangularView<Eigen::Lower>();
  alpha_ = tri.transpose().solve(tri.solve(train_std_));
  lml_ = -0.5 * train_std_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

GpModel GpModel::fit(const Matrix& x, const Vector& y, const Bounds& input_box,
                     const GpFitOptions& options) {
  if (x.rows() < 2) throw UsageError("GpModel::fit: at least two observations required");
  if (x.rows() != y.size()) throw UsageError("GpModel::fit: x and y row counts differ");
  if (!y.allFinite() || !x.allFinite()) throw DataError("GpModel::fit: non-finite training data");
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = i + 1; j < x.rows(); ++j) {
      if ((x.row(i) - x.row(j)).lpNorm<Eigen::Infinity>() <= 1e-10) {
        throw UsageError("GpModel::fit: duplicate training rows; deduplicate first");
      }
    }
  }

  // Standardization and the unit-cube map do not depend on hyperparameters.
  const KernelParams initial{Vector::Constant(x.cols(), 0.3), 1.0, 1e-4};
  GpModel base = condition(initial, x, y, input_box);
  const Index d = x.cols();
  const bool shared = !options.ard;
  const Index nl = shared ? 1 : d;

  Vector lower(nl + 2), upper(nl + 2);
  lower.head(nl).setConstant(std::log(kMinLengthscale));
  upper.head(nl).setConstant(std::log(kMaxLengthscale));
  lower[nl] = std::log(kMinSignal);
  upper[nl] = std::log(kMaxSignal);
  lower[nl + 1] = std::log(kNoiseFloor);
  upper[nl + 1] = std::log(kMaxNoise);

  const Matrix& xu = base.train_unit_;
  const Vector& ys = base.train_std_;
  GradientObjective objective = [&](const Vector& u, Vector& grad) {
    try {
      Vector g;
      const double lml = pacmoo::log_marginal_likelihood(unpack(u, d, shared), xu, ys, &g, shared);
      grad = -g;
      return -lml;
    } catch (const NumericalError&) {
      grad.setZero(u.size());
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<Vector> starts;
  if (options.warm_start) starts.push_back(pack(*options.warm_start, shared));
  starts.push_back(pack(initial, shared));
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> log_ls(std::log(0.05), std::log(2.0));
  std::uniform_real_distribution<double> log_sf(std::log(0.3), std::log(3.0));
  std::uniform_real_distribution<double> log_sn(std::log(1e-6), std::log(1e-2));
  const int total = std::max(1, options.restarts);
  while (static_cast<int>(starts.size()) < total) {
    Vector u(nl + 2);
    for (Index i = 0; i < nl; ++i) u[i] = log_ls(rng);
    u[nl] = log_sf(rng);
    u[nl + 1] = log_sn(rng);
    starts.push_back(u);
  }
  starts.resize(total);

  double best_value = std::numeric_limits<double>::infinity();
  Vector best_u;
  for (const Vector& u0 : starts) {
    const LbfgsResult r =
        minimize_lbfgs_box(objective, u0.cwiseMax(lower).cwiseMin(upper), lower, upper,
                           options.max_iterations);
    if (std::isfinite(r.value) && r.value < best_value) {
      best_value = r.value;
      best_u = r.x;
    }
  }
  if (best_u.size() == 0) throw NumericalError("GpModel::fit: every optimizer start failed");

  base.params_ = unpack(best_u, d, shared);
  base.params_.noise_variance = std::max(base.params_.noise_variance, kNoiseFloor);
  base.condition_in_place();
  return base;
}

Prediction GpModel::predict(const Vector& x) const {
  Vector mean, stddev;
  predict(Matrix(x.transpose()), mean, stddev);
  return {mean[0], stddev[0]};
}

void GpModel::predict(const Matrix& x, Vector& mean, Vector& stddev) const {
  const Matrix xu = to_unit_rows(box_, x);
  const double prior_var = params_.signal_variance + params_.noise_variance;
  Vector var;
  if (train_unit_.rows() == 0) {
    mean = Vector::Zero(x.rows());
    var = Vector::Constant(x.rows(), prior_var);
  } else {
    const Matrix ks = se_kernel_matrix(params_, xu, train_unit_);
    mean = ks * alpha_;
    const Matrix v = chol_.triangularView<Eigen::Lower>().solve(ks.transpose());
    var = (prior_var - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
  }
  mean = (y_mean_ + y_scale_ * mean.array()).matrix();
  stddev = (y_scale_ * var.array().sqrt()).cwiseMax(kStddevFloor).matrix();
}

}  // namespace pacmoo
