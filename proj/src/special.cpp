#include "pacmoo/special.hpp"

#include <cmath>
#include <numbers>

namespace pacmoo::stats {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kTailSwitch = -5.0;
constexpr double kCfSwitch = 3.5;
constexpr int kCfDepth = 200;

// Continued fraction erfc(x) = exp(-x^2) / (sqrt(pi) * t0) with
// t_k = x + ((k + 1) / 2) / t_{k+1}. Returns t0 and t1; valid for x >= kCfSwitch.
struct CfTail {
  double t0;
  double t1;
};

CfTail erfc_continued_fraction(double x) {
  double t = x;
  for (int k = kCfDepth; k >= 2; --k) t = x + (0.5 * k) / t;
  const double t1 = t;
  return {x + 0.5 / t1, t1};
}

}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double erfcx(double x) {
  if (x < kCfSwitch) return std::exp(x * x) * std::erfc(x);
  return 1.0 / (std::sqrt(std::numbers::pi) * erfc_continued_fraction(x).t0);
}

double log_normal_cdf(double z) {
  if (z >= kTailSwitch) {
    if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / kSqrt2));
    return std::log(0.5 * std::erfc(-z / kSqrt2));
  }
  const double x = -z / kSqrt2;
  return std::log(0.5 * erfcx(x)) - x * x;
}

double normal_hazard(double z) {
  if (z >= kTailSwitch) return normal_pdf(z) / normal_cdf(z);
  return kSqrt2 * erfc_continued_fraction(-z / kSqrt2).t0;
}

double truncation_gain(double gamma) {
  if (gamma >= kTailSwitch) {
    return 0.5 * gamma * normal_hazard(gamma) - log_normal_cdf(gamma);
  }
  // Both terms grow like gamma^2 / 2 and cancel; regroup so only O(log) pieces remain:
  //   gain = (gamma / 2) (h + gamma) - ln(Phi(gamma) e^{gamma^2 / 2})
  // with h + gamma = 1 / (sqrt2 t1) and Phi e^{gamma^2/2} = 1 / (2 sqrt(pi) t0).
  const CfTail cf = erfc_continued_fraction(-gamma / kSqrt2);
  const double hazard_plus_gamma = 1.0 / (kSqrt2 * cf.t1);
  return 0.5 * gamma * hazard_plus_gamma + std::log(2.0 * std::sqrt(std::numbers::pi) * cf.t0);
}

}  // namespace pacmoo::stats
