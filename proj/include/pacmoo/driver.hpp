#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacmoo/acquisition.hpp"
#include "pacmoo/evo.hpp"
#include "pacmoo/problem.hpp"

namespace pacmoo {

enum class Algorithm { PacMoo, Random, Nsga2Direct };
enum class InitMode { UniformRandom, ProvidedFeasible };

/// How the point of a trace row was chosen.
enum class Mode { Init, FeasibilitySearch, Entropy, Random, Evolutionary };

std::string_view to_string(Algorithm a);
std::string_view to_string(InitMode m);
std::string_view to_string(Mode m);
Algorithm parse_algorithm(std::string_view s);
InitMode parse_init_mode(std::string_view s);

/// Objective preferences plus the objective-block mass; an absent mass means the balanced 1/2.
struct PreferenceSpec {
  Vector objective_prefs;
  std::optional<double> block_mass;
};

struct AcquisitionBudget {
  /// Candidate pool size; 0 selects 2000 * d capped at 20000.
  int pool_size = 0;
  /// Pattern-search iterations after the pool scan.
  int refine_steps = 100;

  int resolved_pool_size(Index dim) const;
};

struct RunConfig {
  std::string problem = "bnh";
  std::optional<double> feasible_fraction;
  /// Per-output observation noise standard deviation; empty means noiseless.
  Vector noise_std;
  int iterations = 40;
  int initial_points = 10;
  InitMode init_mode = InitMode::UniformRandom;
  /// Absent means equal weight on every objective and constraint.
  std::optional<PreferenceSpec> preferences;
  int pareto_samples = 10;
  int rff_features = 500;
  EvoConfig inner_evo;
  AcquisitionBudget acquisition;
  int gp_restarts = 3;
  bool ard = true;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::PacMoo;
  /// Overrides the benchmark's registered hypervolume reference point.
  std::optional<Vector> reference_point;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  Mode mode = Mode::Init;
  Vector x;
  Vector y;
  bool feasible = false;
  /// Hypervolume of the feasible front of all observations so far.
  double phv = 0.0;
  /// Running per-objective maxima over feasible observations; NaN before the first one.
  Vector best_objectives;
  /// Wallclock milliseconds since the start of the run.
  double elapsed_ms = 0.0;
};

struct RunTrace {
  std::string problem;
  Index dim = 0;
  int num_objectives = 0;
  int num_constraints = 0;
  Vector reference_point;
  std::vector<IterationRecord> records;
  /// Front samples dropped for lack of feasible members, summed over iterations.
  int dropped_front_samples = 0;
  /// Diagnostics: fallbacks taken, model refits that failed.
  std::vector<std::string> notes;
};

/// Runs cfg.algorithm on the benchmark named in cfg.
RunTrace run(const RunConfig& cfg);
/// Runs cfg.algorithm on an explicit problem (cfg.problem is ignored).
RunTrace run(const RunConfig& cfg, const ProblemSpec& problem);

RunTrace run_pacmoo(const RunConfig& cfg, const ProblemSpec& problem);
RunTrace run_baseline_random(const RunConfig& cfg, const ProblemSpec& problem);
/// NSGA-II on the expensive functions, seeded with the initial design, stopped after exactly
/// N0 + T evaluations.
RunTrace run_baseline_nsga2(const RunConfig& cfg, const ProblemSpec& problem);

/// Row-wise batch mean-constraint evaluator: rows of the result hold L predicted means.
using ConstraintMeans = std::function<Matrix(const Matrix&)>;

struct AcquisitionResult {
  Vector x;
  double score = 0.0;
  bool used_fallback = false;
};

/// Scores a scrambled Halton pool, keeps candidates whose predicted constraint means are all
/// >= 0, then refines the best one (lowest index on ties) by coordinate pattern search inside
/// that region. When no candidate passes the filter, the fallback score is maximized instead.
AcquisitionResult maximize_acquisition(const BatchFunction& score, const Bounds& bounds,
                                       const ConstraintMeans& mean_constraints,
                                       const BatchFunction& fallback_score,
                                       const AcquisitionBudget& budget, std::uint64_t seed);

/// Scrambled (randomly shifted) Halton points in the box, rows = points.
Matrix halton_pool(const Bounds& bounds, int n, std::uint64_t seed);

struct ParetoResult {
  std::vector<Vector> pareto_set;
  Matrix pareto_front;
  bool empty = true;
};

/// Nondominated subset of the feasible observations in a trace.
ParetoResult extract_result(const RunTrace& trace);

/// Fills the phv and best_objectives columns of a trace in place.
void annotate_progress(RunTrace& trace);

}  // namespace pacmoo
