#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pacmoo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Misuse of an API: violated precondition, malformed argument.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point outside the problem's box was submitted for evaluation.
class BoundsError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Unknown name in the benchmark registry.
class RegistryError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Non-finite or otherwise unusable training data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Factorization failed even after jitter escalation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box, one (lower, upper) pair per input dimension.
struct Bounds {
  Vector lower;
  Vector upper;

  Bounds() = default;
  Bounds(Vector lo, Vector hi);

  Index dim() const { return lower.size(); }
  Vector width() const { return upper - lower; }
  bool contains(const Vector& x) const;
  Vector clamp(const Vector& x) const;
  /// Maps x affinely to the unit cube.
  Vector to_unit(const Vector& x) const;
  Vector from_unit(const Vector& u) const;
};

/// Scalar function over R^d.
using ScalarFunction = std::function<double(const Vector&)>;

/// Row-wise batch function: rows of the input are points, result has one entry per row.
using BatchFunction = std::function<Vector(const Matrix&)>;

/// Stateless seed derivation (splitmix64 mixing). Streams derived from the same
/// parent are independent of evaluation order, which keeps parallel work deterministic.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

/// Worker count for parallel sections; the PACMOO_THREADS environment variable overrides
/// the hardware default.
int worker_count();

/// Runs body(i) for i in [0, n). Every index is processed exactly once; the call order is
/// unspecified so body must only write to per-index slots.
void parallel_for(Index n, const std::function<void(Index)>& body);

}  // namespace pacmoo
