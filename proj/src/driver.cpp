#include "pacmoo/driver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "pacmoo/pareto.hpp"

namespace pacmoo {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kRandomStream = 3;
constexpr std::uint64_t kIterationStream = 100;
constexpr double kObservedMargin = 0.01;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<Vector> initial_design(const RunConfig& cfg, const ProblemSpec& problem) {
  if (cfg.init_mode == InitMode::ProvidedFeasible) {
    return feasible_initial_design(problem, cfg.initial_points);
  }
  std::mt19937_64 rng(derive_seed(cfg.seed, kInitStream));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Bounds& b = problem.bounds();
  std::vector<Vector> design;
  for (int i = 0; i < cfg.initial_points; ++i) {
    Vector x(b.dim());
    for (Index j = 0; j < b.dim(); ++j) x[j] = b.lower[j] + unit(rng) * (b.upper[j] - b.lower[j]);
    design.push_back(x);
  }
  return design;
}

RunTrace empty_trace(const ProblemSpec& problem, const RunConfig& cfg) {
  RunTrace trace;
  trace.problem = problem.name();
  trace.dim = problem.dim();
  trace.num_objectives = problem.num_objectives();
  trace.num_constraints = problem.num_constraints();
  if (cfg.reference_point) {
    trace.reference_point = *cfg.reference_point;
  } else if (problem.reference_point()) {
    trace.reference_point = *problem.reference_point();
  }
  return trace;
}

void append(RunTrace& trace, const Observation& obs, Mode mode, Clock::time_point start) {
  IterationRecord r;
  r.iteration = static_cast<int>(trace.records.size());
  r.mode = mode;
  r.x = obs.x;
  r.y = obs.y;
  r.feasible = obs.feasible;
  r.elapsed_ms = elapsed_ms(start);
  trace.records.push_back(std::move(r));
}

// Refits every output model on the current data; a failed fit falls back to conditioning on
// the previous hyperparameters.
SurrogateBundle fit_bundle(const Dataset& data, const SurrogateBundle* previous,
                           const RunConfig& cfg, std::uint64_t seed, RunTrace& trace) {
  const ProblemSpec& problem = data.problem();
  const int k = problem.num_objectives();
  const int outputs = problem.num_outputs();
  const Matrix x_all = data.inputs();
  const Matrix y_all = data.outputs();
  std::vector<std::optional<GpModel>> models(outputs);
  std::vector<std::string> failures(outputs);

  parallel_for(outputs, [&](Index j) {
    Matrix x = x_all;
    Vector y = y_all.col(j);
    deduplicate(x, y);
    GpFitOptions opts;
    opts.restarts = cfg.gp_restarts;
    opts.ard = cfg.ard;
    opts.seed = derive_seed(seed, static_cast<std::uint64_t>(j));
    const GpModel* prev = previous ? &previous->model(static_cast<int>(j)) : nullptr;
    if (prev) opts.warm_start = prev->params();
    try {
      models[j] = GpModel::fit(x, y, problem.bounds(), opts);
    } catch (const NumericalError& e) {
      if (prev == nullptr) throw;
      failures[j] = "output " + std::to_string(j) + ": fit failed (" + e.what() +
                    "), reusing previous hyperparameters";
      models[j] = GpModel::condition(prev->params(), x, y, problem.bounds());
    }
  });

  SurrogateBundle bundle;
  for (int j = 0; j < outputs; ++j) {
    if (!failures[j].empty()) trace.notes.push_back(failures[j]);
    (j < k ? bundle.objective_models : bundle.constraint_models).push_back(std::move(*models[j]));
  }
  return bundle;
}

ConstraintMeans constraint_means(const SurrogateBundle& bundle) {
  if (bundle.num_constraints() == 0) return nullptr;
  return [&bundle](const Matrix& x) {
    Matrix means(x.rows(), bundle.num_constraints());
    Vector mu, sd;
    for (int i = 0; i < bundle.num_constraints(); ++i) {
      bundle.constraint_models[i].predict(x, mu, sd);
      means.col(i) = mu;
    }
    return means;
  };
}

std::vector<bool> passes(const ConstraintMeans& means, const Matrix& x) {
  std::vector<bool> ok(x.rows(), true);
  if (!means) return ok;
  const Matrix m = means(x);
  for (Index i = 0; i < x.rows(); ++i) ok[i] = (m.row(i).array() >= 0.0).all();
  return ok;
}

// Coordinate pattern search from x; moves only to strictly better points that pass the filter.
AcquisitionResult pattern_search(const BatchFunction& score, const Bounds& bounds,
                                 const ConstraintMeans& means, Vector x, double fx, int steps) {
  const Index d = bounds.dim();
  const Vector width = bounds.width();
  double step = 0.1;
  for (int it = 0; it < steps && step > 1e-7; ++it) {
    Matrix neighbors(2 * d, d);
    for (Index k = 0; k < d; ++k) {
      Vector up = x, down = x;
      up[k] += step * width[k];
      down[k] -= step * width[k];
      neighbors.row(2 * k) = bounds.clamp(up).transpose();
      neighbors.row(2 * k + 1) = bounds.clamp(down).transpose();
    }
    const std::vector<bool> ok = passes(means, neighbors);
    const Vector values = score(neighbors);
    Index best = -1;
    double best_value = fx;
    for (Index i = 0; i < neighbors.rows(); ++i) {
      if (ok[i] && values[i] > best_value) {
        best = i;
        best_value = values[i];
      }
    }
    if (best >= 0) {
      x = neighbors.row(best).transpose();
      fx = best_value;
    } else {
      step *= 0.5;
    }
  }
  return {x, fx, false};
}

constexpr int kPrimes[] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
                           43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
                           103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167};

double radical_inverse(long i, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (i > 0) {
    result += f * static_cast<double>(i % base);
    i /= base;
    f /= base;
  }
  return result;
}

// Observed maximum of each output plus a small margin in that output's standardized units.
Vector observed_floor(const Dataset& data, const SurrogateBundle& bundle) {
  Vector floor = data.outputs().colwise().maxCoeff().transpose();
  for (int j = 0; j < bundle.num_outputs(); ++j) {
    floor[j] += kObservedMargin * bundle.model(j).y_scale();
  }
  return floor;
}

Observation observe(const ProblemSpec& problem, const Vector& x, const RunConfig& cfg,
                    std::mt19937_64& noise_rng) {
  return evaluate_noisy(problem, x, cfg.noise_std, noise_rng);
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::PacMoo: return "pacmoo";
    case Algorithm::Random: return "random";
    case Algorithm::Nsga2Direct: return "nsga2-direct";
  }
  return "";
}

std::string_view to_string(InitMode m) {
  return m == InitMode::UniformRandom ? "uniform-random" : "provided-feasible";
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Init: return "init";
    case Mode::FeasibilitySearch: return "feasibility";
    case Mode::Entropy: return "entropy";
    case Mode::Random: return "random";
    case Mode::Evolutionary: return "nsga2";
  }
  return "";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "pacmoo") return Algorithm::PacMoo;
  if (s == "random") return Algorithm::Random;
  if (s == "nsga2-direct" || s == "nsga2") return Algorithm::Nsga2Direct;
  throw UsageError("unknown algorithm '" + std::string(s) + "'");
}

InitMode parse_init_mode(std::string_view s) {
  if (s == "uniform-random" || s == "random") return InitMode::UniformRandom;
  if (s == "provided-feasible" || s == "feasible") return InitMode::ProvidedFeasible;
  throw UsageError("unknown init mode '" + std::string(s) + "'");
}

int AcquisitionBudget::resolved_pool_size(Index dim) const {
  if (pool_size > 0) return pool_size;
  return static_cast<int>(std::min<Index>(2000 * dim, 20000));
}

void RunConfig::validate() const {
  if (iterations < 1) throw UsageError("RunConfig: iterations must be >= 1");
  if (initial_points < 2) throw UsageError("RunConfig: initial_points must be >= 2");
  if (pareto_samples < 1) throw UsageError("RunConfig: pareto_samples must be >= 1");
  if (rff_features < 1) throw UsageError("RunConfig: rff_features must be >= 1");
  if (gp_restarts < 1) throw UsageError("RunConfig: gp_restarts must be >= 1");
  if (acquisition.refine_steps < 0 || acquisition.pool_size < 0) {
    throw UsageError("RunConfig: acquisition budget must be non-negative");
  }
  if (feasible_fraction && !(*feasible_fraction > 0.0 && *feasible_fraction <= 1.0)) {
    throw UsageError("RunConfig: feasible_fraction must lie in (0, 1]");
  }
  inner_evo.validate();
}

Matrix halton_pool(const Bounds& bounds, int n, std::uint64_t seed) {
  const Index d = bounds.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector shift(d);
  for (Index k = 0; k < d; ++k) shift[k] = unit(rng);
  constexpr Index kNumPrimes = static_cast<Index>(std::size(kPrimes));
  Matrix pool(n, d);
  for (int i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      // Beyond the prime table the sequence degrades to plain uniform sampling.
      const double u = k < kNumPrimes ? radical_inverse(i + 1, kPrimes[k]) : unit(rng);
      const double v = std::fmod(u + shift[k], 1.0);
      pool(i, k) = bounds.lower[k] + v * (bounds.upper[k] - bounds.lower[k]);
    }
  }
  return pool;
}

AcquisitionResult maximize_acquisition(const BatchFunction& score, const Bounds& bounds,
                                       const ConstraintMeans& mean_constraints,
                                       const BatchFunction& fallback_score,
                                       const AcquisitionBudget& budget, std::uint64_t seed) {
  const int n = budget.resolved_pool_size(bounds.dim());
  if (n < 1) throw UsageError("maximize_acquisition: budget must be >= 1");
  const Matrix pool = halton_pool(bounds, n, seed);
  const std::vector<bool> ok = passes(mean_constraints, pool);

  std::vector<Index> candidates;
  for (Index i = 0; i < pool.rows(); ++i) {
    if (ok[i]) candidates.push_back(i);
  }

  if (candidates.empty()) {
    if (!fallback_score) {
      throw UsageError("maximize_acquisition: no candidate satisfies the constraint filter");
    }
    const Vector values = fallback_score(pool);
    Index best = 0;
    for (Index i = 1; i < values.size(); ++i) {
      if (values[i] > values[best]) best = i;
    }
    AcquisitionResult r = pattern_search(fallback_score, bounds, nullptr,
                                         pool.row(best).transpose(), values[best],
                                         budget.refine_steps);
    r.used_fallback = true;
    return r;
  }

  const Matrix filtered = select_rows(pool, candidates);
  const Vector values = score(filtered);
  Index best = 0;
  for (Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return pattern_search(score, bounds, mean_constraints, filtered.row(best).transpose(),
                        values[best], budget.refine_steps);
}

RunTrace run(const RunConfig& cfg) {
  const ProblemSpec problem = make_benchmark(cfg.problem, cfg.feasible_fraction);
  return run(cfg, problem);
}

RunTrace run(const RunConfig& cfg, const ProblemSpec& problem) {
  switch (cfg.algorithm) {
    case Algorithm::PacMoo: return run_pacmoo(cfg, problem);
    case Algorithm::Random: return run_baseline_random(cfg, problem);
    case Algorithm::Nsga2Direct: return run_baseline_nsga2(cfg, problem);
  }
  throw UsageError("run: unknown algorithm");
}

RunTrace run_pacmoo(const RunConfig& cfg, const ProblemSpec& problem) {
  cfg.validate();
  const auto start = Clock::now();
  RunTrace trace = empty_trace(problem, cfg);
  Dataset data(problem);
  std::mt19937_64 noise_rng(derive_seed(cfg.seed, kNoiseStream));

  const int k = problem.num_objectives();
  const int l = problem.num_constraints();
  const PreferenceVector preferences =
      cfg.preferences ? make_preferences(cfg.preferences->objective_prefs, l,
                                         cfg.preferences->block_mass)
                      : PreferenceVector::uniform(k, l);
  if (preferences.num_objectives() != k) {
    throw UsageError("run_pacmoo: preference vector does not match the problem");
  }

  for (const Vector& x : initial_design(cfg, problem)) {
    Observation obs = observe(problem, x, cfg, noise_rng);
    append(trace, obs, Mode::Init, start);
    data.add(std::move(obs));
  }
  SurrogateBundle bundle =
      fit_bundle(data, nullptr, cfg, derive_seed(cfg.seed, kIterationStream - 1), trace);

  for (int t = 0; t < cfg.iterations; ++t) {
    const std::uint64_t iter_seed = derive_seed(cfg.seed, kIterationStream + t);
    const std::uint64_t pool_seed = derive_seed(iter_seed, 2);
    BatchFunction feasibility = [&bundle](const Matrix& x) {
      return acquisition_feasibility(bundle, x);
    };

    Mode mode = Mode::FeasibilitySearch;
    Vector next;
    if (!data.has_feasible()) {
      next = maximize_acquisition(feasibility, problem.bounds(), nullptr, nullptr,
                                  cfg.acquisition, pool_seed)
                 .x;
    } else {
      FrontSamples samples =
          sample_pareto_fronts(bundle, problem.bounds(), cfg.pareto_samples, cfg.rff_features,
                               cfg.inner_evo, derive_seed(iter_seed, 1));
      trace.dropped_front_samples += samples.dropped;
      raise_front_maxima(samples.fronts, observed_floor(data, bundle));
      if (samples.all_dropped()) {
        trace.notes.push_back("iteration " + std::to_string(t) +
                              ": every front sample dropped, maximizing feasibility probability");
        next = maximize_acquisition(feasibility, problem.bounds(), nullptr, nullptr,
                                    cfg.acquisition, pool_seed)
                   .x;
      } else {
        const Vector& weights = preferences.weights();
        BatchFunction entropy = [&](const Matrix& x) -> Vector {
          return acquisition_components(bundle, x, samples.fronts) * weights;
        };
        const AcquisitionResult r =
            maximize_acquisition(entropy, problem.bounds(), constraint_means(bundle),
                                 feasibility, cfg.acquisition, pool_seed);
        next = r.x;
        if (r.used_fallback) {
          trace.notes.push_back("iteration " + std::to_string(t) +
                                ": no candidate with nonnegative constraint means, "
                                "maximizing feasibility probability");
        } else {
          mode = Mode::Entropy;
        }
      }
    }

    Observation obs = observe(problem, next, cfg, noise_rng);
    append(trace, obs, mode, start);
    data.add(std::move(obs));
    bundle = fit_bundle(data, &bundle, cfg, derive_seed(iter_seed, 3), trace);
    trace.records.back().elapsed_ms = elapsed_ms(start);
  }
  annotate_progress(trace);
  return trace;
}

RunTrace run_baseline_random(const RunConfig& cfg, const ProblemSpec& problem) {
  cfg.validate();
  const auto start = Clock::now();
  RunTrace trace = empty_trace(problem, cfg);
  std::mt19937_64 noise_rng(derive_seed(cfg.seed, kNoiseStream));
  for (const Vector& x : initial_design(cfg, problem)) {
    append(trace, observe(problem, x, cfg, noise_rng), Mode::Init, start);
  }
  std::mt19937_64 rng(derive_seed(cfg.seed, kRandomStream));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Bounds& b = problem.bounds();
  for (int t = 0; t < cfg.iterations; ++t) {
    Vector x(b.dim());
    for (Index j = 0; j < b.dim(); ++j) x[j] = b.lower[j] + unit(rng) * (b.upper[j] - b.lower[j]);
    append(trace, observe(problem, x, cfg, noise_rng), Mode::Random, start);
  }
  annotate_progress(trace);
  return trace;
}

RunTrace run_baseline_nsga2(const RunConfig& cfg, const ProblemSpec& problem) {
  cfg.validate();
  const auto start = Clock::now();
  RunTrace trace = empty_trace(problem, cfg);
  std::mt19937_64 noise_rng(derive_seed(cfg.seed, kNoiseStream));

  const std::vector<Vector> init = initial_design(cfg, problem);
  const std::size_t budget = static_cast<std::size_t>(cfg.initial_points + cfg.iterations);
  int population = std::max(4, cfg.initial_points + (cfg.initial_points % 2));
  Matrix seeded(static_cast<Index>(init.size()), problem.dim());
  for (std::size_t i = 0; i < init.size(); ++i) seeded.row(i) = init[i].transpose();

  struct BudgetExhausted {};
  PopulationEvaluator evaluate = [&](const Matrix& x) {
    Matrix y(x.rows(), problem.num_outputs());
    for (Index i = 0; i < x.rows(); ++i) {
      if (trace.records.size() >= budget) throw BudgetExhausted{};
      const Mode mode = trace.records.size() < init.size() ? Mode::Init : Mode::Evolutionary;
      const Observation obs = observe(problem, x.row(i).transpose(), cfg, noise_rng);
      append(trace, obs, mode, start);
      y.row(i) = obs.y.transpose();
    }
    return y;
  };

  EvoConfig evo = cfg.inner_evo;
  evo.population_size = population;
  evo.generations = static_cast<int>((budget + population - 1) / population);
  evo.seed = derive_seed(cfg.seed, kRandomStream);
  try {
    nsga2_constrained(evaluate, problem.num_objectives(), problem.bounds(), evo, seeded);
  } catch (const BudgetExhausted&) {
  }
  annotate_progress(trace);
  return trace;
}

void annotate_progress(RunTrace& trace) {
  const int k = trace.num_objectives;
  if (trace.reference_point.size() == 0) {
    // No registered reference: worst feasible value per objective minus 1% of the range.
    Vector lo = Vector::Constant(k, std::numeric_limits<double>::infinity());
    Vector hi = -lo;
    for (const auto& r : trace.records) {
      if (!r.feasible) continue;
      lo = lo.cwiseMin(r.y.head(k));
      hi = hi.cwiseMax(r.y.head(k));
    }
    trace.reference_point =
        lo.allFinite() ? Vector(lo - 0.01 * (hi - lo).cwiseMax(1e-12)) : Vector(Vector::Zero(k));
  }
  std::vector<Vector> feasible;
  Vector best = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
  double phv = 0.0;
  for (auto& r : trace.records) {
    if (r.feasible) {
      const Vector f = r.y.head(k);
      feasible.push_back(f);
      for (int j = 0; j < k; ++j) best[j] = std::isnan(best[j]) ? f[j] : std::max(best[j], f[j]);
      Matrix front(static_cast<Index>(feasible.size()), k);
      for (std::size_t i = 0; i < feasible.size(); ++i) front.row(i) = feasible[i].transpose();
      phv = hypervolume(front, trace.reference_point);
    }
    r.phv = phv;
    r.best_objectives = best;
  }
}

ParetoResult extract_result(const RunTrace& trace) {
  ParetoResult result;
  const int k = trace.num_objectives;
  std::vector<Index> feasible;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    if (trace.records[i].feasible) feasible.push_back(static_cast<Index>(i));
  }
  result.pareto_front.resize(0, k);
  if (feasible.empty()) return result;
  Matrix objectives(static_cast<Index>(feasible.size()), k);
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    objectives.row(i) = trace.records[feasible[i]].y.head(k).transpose();
  }
  const std::vector<Index> front = pareto_front(objectives);
  result.pareto_front = select_rows(objectives, front);
  for (Index i : front) result.pareto_set.push_back(trace.records[feasible[i]].x);
  result.empty = false;
  return result;
}

}  // namespace pacmoo
