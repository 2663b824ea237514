#pragma once

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pacmoo/core.hpp"

namespace pacmoo {

/// Black-box constrained multi-objective problem. All objectives are maximized and
/// constraints read c(x) >= 0. The evaluator returns (f_1..f_K, c_1..c_L).
class ProblemSpec {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  ProblemSpec(std::string name, Bounds bounds, int num_objectives, int num_constraints,
              Evaluator evaluator);

  const std::string& name() const { return name_; }
  const Bounds& bounds() const { return bounds_; }
  Index dim() const { return bounds_.dim(); }
  int num_objectives() const { return num_objectives_; }
  int num_constraints() const { return num_constraints_; }
  int num_outputs() const { return num_objectives_ + num_constraints_; }
  const Evaluator& evaluator() const { return evaluator_; }

  /// Hypervolume reference point registered with the benchmark, if any.
  const std::optional<Vector>& reference_point() const { return reference_point_; }
  void set_reference_point(Vector r);

 private:
  std::string name_;
  Bounds bounds_;
  int num_objectives_;
  int num_constraints_;
  Evaluator evaluator_;
  std::optional<Vector> reference_point_;
};

struct Observation {
  Vector x;
  Vector y;  // objectives then constraints
  bool feasible = false;
};

/// True iff every constraint component (indices K..K+L-1) is >= 0.
bool is_feasible(const Vector& y, int num_objectives);

/// Evaluates x; throws BoundsError when x lies outside the box.
Observation evaluate(const ProblemSpec& problem, const Vector& x);

/// Adds i.i.d. Gaussian noise per output (noise_std has K+L entries, or is empty for none)
/// and recomputes feasibility from the noisy constraint values.
Observation evaluate_noisy(const ProblemSpec& problem, const Vector& x, const Vector& noise_std,
                           std::mt19937_64& rng);

/// Observations accumulated by one optimization run, in evaluation order.
class Dataset {
 public:
  explicit Dataset(const ProblemSpec& problem) : problem_(&problem) {}

  void add(Observation obs);
  const ProblemSpec& problem() const { return *problem_; }
  const std::vector<Observation>& observations() const { return observations_; }
  Index size() const { return static_cast<Index>(observations_.size()); }
  bool has_feasible() const;

  /// n x d matrix of inputs.
  Matrix inputs() const;
  /// n x (K+L) matrix of outputs.
  Matrix outputs() const;

 private:
  const ProblemSpec* problem_;
  std::vector<Observation> observations_;
};

/// Names accepted by make_benchmark.
std::vector<std::string> benchmark_names();

/// Builds a registered benchmark. When feasible_fraction_target is set, every constraint is
/// shifted by a common multiple of its own spread until the Monte-Carlo feasible fraction
/// matches the target.
ProblemSpec make_benchmark(std::string_view name,
                           std::optional<double> feasible_fraction_target = std::nullopt);

/// Fraction of uniform samples in the box that are feasible.
double estimate_feasible_fraction(const ProblemSpec& problem, long n_samples, std::uint64_t seed);

/// Returns a copy of the problem whose constraints are c_i(x) - shift * scale_i, with shift
/// found by bisection so the estimated feasible fraction is close to target.
ProblemSpec tighten_constraints(const ProblemSpec& problem, double target, std::uint64_t seed);

/// Deterministic set of n feasible points found by rejection sampling with a fixed seed;
/// stands in for an expert-provided feasible initial design.
std::vector<Vector> feasible_initial_design(const ProblemSpec& problem, int n);

}  // namespace pacmoo
