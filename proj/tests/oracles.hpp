#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "pacmoo/core.hpp"

namespace oracle {

using pacmoo::Index;
using pacmoo::Matrix;
using pacmoo::Vector;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Entropy lost by upper-truncating N(mu, sigma^2) at y_star, integrated numerically:
//   H[N] - H[truncated] = 0.5 - ln Z - E_trunc[z^2] / 2,  Z = P(z <= gamma).
// The integrand is rescaled by exp(m^2 / 2) with m = min(gamma, 0) so that deep truncations
// keep full relative precision.
inline double truncated_entropy_drop(double mu, double sigma, double y_star) {
  const double gamma = (y_star - mu) / sigma;
  const double m = std::min(gamma, 0.0);
  auto w = [&](double t) {
    const double z = gamma - t;
    return std::exp(-0.5 * (z * z - m * m));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double tol = 1e-14;
  const double mass = integrator.integrate(w, 0.0, std::numeric_limits<double>::infinity(), tol);
  const double second = integrator.integrate(
      [&](double t) {
        const double z = gamma - t;
        return z * z * w(t);
      },
      0.0, std::numeric_limits<double>::infinity(), tol);
  // ln Z = ln phi(m) + ln(mass)
  const double log_z = -0.5 * m * m - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(mass);
  return 0.5 - log_z - 0.5 * second / mass;
}

// GP posterior via an explicit inverse of the Gram matrix. Inputs are given in the unit cube
// and targets already standardized.
struct DenseGp {
  Vector lengthscales;
  double signal = 1.0;
  double noise = 1e-6;
  Matrix x;
  Vector y;
  Matrix k_inv;

  double kernel(const Vector& a, const Vector& b) const {
    double s = 0.0;
    for (Index k = 0; k < a.size(); ++k) {
      const double r = (a[k] - b[k]) / lengthscales[k];
      s += r * r;
    }
    return signal * std::exp(-0.5 * s);
  }

  void fit() {
    const Index n = x.rows();
    Matrix k(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) k(i, j) = kernel(x.row(i), x.row(j));
    }
    k.diagonal().array() += noise;
    k_inv = k.fullPivLu().inverse();
  }

  // Mean and variance (including noise) at u.
  std::pair<double, double> predict(const Vector& u) const {
    Vector ks(x.rows());
    for (Index i = 0; i < x.rows(); ++i) ks[i] = kernel(u, x.row(i));
    const double mean = ks.dot(k_inv * y);
    const double var = signal + noise - ks.dot(k_inv * ks);
    return {mean, var};
  }
};

inline bool weakly_dominates_strictly(const Vector& a, const Vector& b) {
  bool strict = false;
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

// O(n^2) nondominated filter.
inline std::vector<Index> brute_force_front(const Matrix& points) {
  std::vector<Index> out;
  for (Index i = 0; i < points.rows(); ++i) {
    bool dominated = false;
    for (Index j = 0; j < points.rows() && !dominated; ++j) {
      dominated = weakly_dominates_strictly(points.row(j), points.row(i));
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

// Monte-Carlo estimate of the volume dominated by `front` above `ref`.
inline double monte_carlo_hypervolume(const Matrix& front, const Vector& ref, long samples,
                                      std::uint64_t seed) {
  const Vector hi = front.colwise().maxCoeff().transpose();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long hits = 0;
  Vector p(ref.size());
  for (long s = 0; s < samples; ++s) {
    for (Index k = 0; k < p.size(); ++k) p[k] = ref[k] + u(rng) * (hi[k] - ref[k]);
    for (Index i = 0; i < front.rows(); ++i) {
      if ((front.row(i).transpose().array() >= p.array()).all()) {
        ++hits;
        break;
      }
    }
  }
  return (hi - ref).prod() * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace oracle
