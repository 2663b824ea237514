#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pacmoo/core.hpp"

namespace pacmoo {

struct EvoConfig {
  int population_size = 100;
  int generations = 50;
  double crossover_prob = 0.9;
  /// Per-variable mutation probability; a negative value means 1/d.
  double mutation_prob = -1.0;
  double eta_crossover = 15.0;
  double eta_mutation = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Final population of a constrained NSGA-II run. Rows of inputs/outputs are members;
/// outputs hold (objectives, constraints).
struct EvoResult {
  Matrix inputs;
  Matrix outputs;
  /// Feasible members of the first constrained-domination front (empty when none feasible).
  std::vector<Index> front_indices;
  bool any_feasible = false;
};

/// Evaluates a whole population at once: rows of the argument are members, rows of the
/// result are their K+L outputs.
using PopulationEvaluator = std::function<Matrix(const Matrix&)>;

/// Called after each generation's survival step with the generation index (0 = initial) and
/// the surviving population.
using GenerationObserver =
    std::function<void(int generation, const Matrix& inputs, const Matrix& outputs)>;

/// Sum of max(0, -c_i).
double total_violation(const Vector& constraint_values);

/// Deb's constrained-domination sort. Returns fronts of row indices, best first.
std::vector<std::vector<Index>> constrained_nondominated_sort(const Matrix& objectives,
                                                              const Vector& violations);

/// Crowding distance of each member of `front` (same order); boundary members get +inf.
Vector crowding_distance(const Matrix& objectives, const std::vector<Index>& front);

/// Constrained NSGA-II over a population evaluator producing K objectives followed by
/// the constraints. The evaluator is called once for the initial population and once per
/// generation, so total evaluations = population_size * (generations + 1).
EvoResult nsga2_constrained(const PopulationEvaluator& evaluate, int num_objectives,
                            const Bounds& bounds, const EvoConfig& cfg,
                            const std::optional<Matrix>& initial_population = std::nullopt,
                            const GenerationObserver& observer = nullptr);

/// Convenience overload over separate scalar objective and constraint functions.
EvoResult nsga2_constrained(const std::vector<ScalarFunction>& objectives,
                            const std::vector<ScalarFunction>& constraints, const Bounds& bounds,
                            const EvoConfig& cfg);

}  // namespace pacmoo
