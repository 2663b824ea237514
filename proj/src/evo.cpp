#include "pacmoo/evo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pacmoo/pareto.hpp"

namespace pacmoo {

void EvoConfig::validate() const {
  if (population_size < 4 || population_size % 2 != 0) {
    throw UsageError("EvoConfig: population_size must be even and >= 4");
  }
  if (generations < 1) throw UsageError("EvoConfig: generations must be >= 1");
  if (crossover_prob < 0.0 || crossover_prob > 1.0) {
    throw UsageError("EvoConfig: crossover_prob must lie in [0, 1]");
  }
  if (mutation_prob > 1.0) throw UsageError("EvoConfig: mutation_prob must be <= 1");
  if (!(eta_crossover > 0.0) || !(eta_mutation > 0.0)) {
    throw UsageError("EvoConfig: distribution indices must be positive");
  }
}

double total_violation(const Vector& constraint_values) {
  return (-constraint_values.array()).cwiseMax(0.0).sum();
}

namespace {

bool constrained_dominates(const Matrix& obj, const Vector& viol, Index a, Index b) {
  const bool fa = viol[a] <= 0.0;
  const bool fb = viol[b] <= 0.0;
  if (fa && !fb) return true;
  if (!fa && fb) return false;
  if (!fa && !fb) return viol[a] < viol[b];
  return dominates(obj.row(a), obj.row(b));
}

struct Population {
  Matrix x;
  Matrix y;
  Vector violation;
  std::vector<int> rank;
  Vector crowding;
};

void rank_population(Population& pop, int k) {
  const Matrix obj = pop.y.leftCols(k);
  const auto fronts = constrained_nondominated_sort(obj, pop.violation);
  pop.rank.assign(pop.x.rows(), 0);
  pop.crowding = Vector::Zero(pop.x.rows());
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    const Vector cd = crowding_distance(obj, fronts[f]);
    for (std::size_t i = 0; i < fronts[f].size(); ++i) {
      pop.rank[fronts[f][i]] = static_cast<int>(f);
      pop.crowding[fronts[f][i]] = cd[static_cast<Index>(i)];
    }
  }
}

Vector violations_of(const Matrix& y, int k) {
  Vector v(y.rows());
  for (Index i = 0; i < y.rows(); ++i) {
    v[i] = total_violation(y.row(i).tail(y.cols() - k).transpose());
  }
  return v;
}

class Variation {
 public:
  Variation(const Bounds& bounds, const EvoConfig& cfg, std::mt19937_64& rng)
      : bounds_(bounds), cfg_(cfg), rng_(rng) {
    pm_ = cfg.mutation_prob < 0.0 ? 1.0 / static_cast<double>(bounds.dim()) : cfg.mutation_prob;
  }

  void crossover(Vector& c1, Vector& c2) {
    if (uniform() > cfg_.crossover_prob) return;
    const double eta = cfg_.eta_crossover;
    for (Index i = 0; i < c1.size(); ++i) {
      if (uniform() > 0.5) continue;
      if (std::abs(c1[i] - c2[i]) <= 1e-14) continue;
      const double y1 = std::min(c1[i], c2[i]);
      const double y2 = std::max(c1[i], c2[i]);
      const double yl = bounds_.lower[i];
      const double yu = bounds_.upper[i];
      const double r = uniform();

      auto spread = [&](double beta) {
        const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        return r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / (eta + 1.0))
                                : std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
      };
      const double bq1 = spread(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
      double a = 0.5 * ((y1 + y2) - bq1 * (y2 - y1));
      const double bq2 = spread(1.0 + 2.0 * (yu - y2) / (y2 - y1));
      double b = 0.5 * ((y1 + y2) + bq2 * (y2 - y1));
      a = std::clamp(a, yl, yu);
      b = std::clamp(b, yl, yu);
      if (uniform() <= 0.5) std::swap(a, b);
      c1[i] = a;
      c2[i] = b;
    }
  }

  void mutate(Vector& c) {
    const double eta = cfg_.eta_mutation;
    const double power = 1.0 / (eta + 1.0);
    for (Index i = 0; i < c.size(); ++i) {
      if (uniform() > pm_) continue;
      const double yl = bounds_.lower[i];
      const double yu = bounds_.upper[i];
      const double y = c[i];
      const double d1 = (y - yl) / (yu - yl);
      const double d2 = (yu - y) / (yu - yl);
      const double r = uniform();
      double dq;
      if (r < 0.5) {
        const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
        dq = std::pow(val, power) - 1.0;
      } else {
        const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
        dq = 1.0 - std::pow(val, power);
      }
      c[i] = std::clamp(y + dq * (yu - yl), yl, yu);
    }
  }

  double uniform() { return unit_(rng_); }

 private:
  const Bounds& bounds_;
  const EvoConfig& cfg_;
  std::mt19937_64& rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  double pm_;
};

Index tournament(const Population& pop, std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> pick(0, pop.x.rows() - 1);
  const Index a = pick(rng);
  const Index b = pick(rng);
  if (pop.rank[a] != pop.rank[b]) return pop.rank[a] < pop.rank[b] ? a : b;
  if (pop.crowding[a] != pop.crowding[b]) return pop.crowding[a] > pop.crowding[b] ? a : b;
  return std::min(a, b);
}

Matrix checked_evaluate(const PopulationEvaluator& evaluate, const Matrix& x, int k) {
  Matrix y = evaluate(x);
  if (y.rows() != x.rows() || y.cols() < k) {
    throw UsageError("nsga2_constrained: evaluator returned a matrix of the wrong shape");
  }
  return y;
}

}  // namespace

std::vector<std::vector<Index>> constrained_nondominated_sort(const Matrix& objectives,
                                                              const Vector& violations) {
  const Index n = objectives.rows();
  std::vector<std::vector<Index>> dominated_by_me(n);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<Index>> fronts(1);
  for (Index p = 0; p < n; ++p) {
    for (Index q = 0; q < n; ++q) {
      if (p == q) continue;
      if (constrained_dominates(objectives, violations, p, q)) {
        dominated_by_me[p].push_back(q);
      } else if (constrained_dominates(objectives, violations, q, p)) {
        ++domination_count[p];
      }
    }
    if (domination_count[p] == 0) fronts[0].push_back(p);
  }
  while (true) {
    std::vector<Index> next;
    for (Index p : fronts.back()) {
      for (Index q : dominated_by_me[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  if (fronts[0].empty()) fronts.clear();
  return fronts;
}

Vector crowding_distance(const Matrix& objectives, const std::vector<Index>& front) {
  const Index n = static_cast<Index>(front.size());
  Vector distance = Vector::Zero(n);
  if (n <= 2) {
    distance.setConstant(std::numeric_limits<double>::infinity());
    return distance;
  }
  std::vector<Index> order(n);
  for (Index k = 0; k < objectives.cols(); ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return objectives(front[a], k) < objectives(front[b], k);
    });
    const double lo = objectives(front[order.front()], k);
    const double hi = objectives(front[order.back()], k);
    distance[order.front()] = std::numeric_limits<double>::infinity();
    distance[order.back()] = std::numeric_limits<double>::infinity();
    if (hi <= lo) continue;
    for (Index i = 1; i + 1 < n; ++i) {
      distance[order[i]] +=
          (objectives(front[order[i + 1]], k) - objectives(front[order[i - 1]], k)) / (hi - lo);
    }
  }
  return distance;
}

EvoResult nsga2_constrained(const PopulationEvaluator& evaluate, int num_objectives,
                            const Bounds& bounds, const EvoConfig& cfg,
                            const std::optional<Matrix>& initial_population,
                            const GenerationObserver& observer) {
  cfg.validate();
  const int k = num_objectives;
  const Index n = cfg.population_size;
  const Index d = bounds.dim();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Population pop;
  pop.x.resize(n, d);
  Index seeded = 0;
  if (initial_population) {
    if (initial_population->cols() != d || initial_population->rows() > n) {
      throw UsageError("nsga2_constrained: initial population has the wrong shape");
    }
    seeded = initial_population->rows();
    pop.x.topRows(seeded) = *initial_population;
  }
  for (Index i = seeded; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      pop.x(i, j) = bounds.lower[j] + unit(rng) * (bounds.upper[j] - bounds.lower[j]);
    }
  }
  pop.y = checked_evaluate(evaluate, pop.x, k);
  pop.violation = violations_of(pop.y, k);
  rank_population(pop, k);
  if (observer) observer(0, pop.x, pop.y);

  Variation variation(bounds, cfg, rng);
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    Matrix offspring(n, d);
    for (Index i = 0; i < n; i += 2) {
      Vector c1 = pop.x.row(tournament(pop, rng)).transpose();
      Vector c2 = pop.x.row(tournament(pop, rng)).transpose();
      variation.crossover(c1, c2);
      variation.mutate(c1);
      variation.mutate(c2);
      offspring.row(i) = c1.transpose();
      offspring.row(i + 1) = c2.transpose();
    }
    const Matrix offspring_y = checked_evaluate(evaluate, offspring, k);

    Population merged;
    merged.x.resize(2 * n, d);
    merged.x << pop.x, offspring;
    merged.y.resize(2 * n, pop.y.cols());
    merged.y << pop.y, offspring_y;
    merged.violation = violations_of(merged.y, k);
    const Matrix obj = merged.y.leftCols(k);
    const auto fronts = constrained_nondominated_sort(obj, merged.violation);

    std::vector<Index> survivors;
    survivors.reserve(n);
    for (const auto& front : fronts) {
      if (static_cast<Index>(survivors.size() + front.size()) <= n) {
        survivors.insert(survivors.end(), front.begin(), front.end());
        continue;
      }
      const Vector cd = crowding_distance(obj, front);
      std::vector<Index> order(front.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return cd[a] > cd[b]; });
      for (Index i : order) {
        if (static_cast<Index>(survivors.size()) == n) break;
        survivors.push_back(front[i]);
      }
      break;
    }
    pop.x = select_rows(merged.x, survivors);
    pop.y = select_rows(merged.y, survivors);
    pop.violation = violations_of(pop.y, k);
    rank_population(pop, k);
    if (observer) observer(gen, pop.x, pop.y);
  }

  EvoResult result;
  result.inputs = pop.x;
  result.outputs = pop.y;
  for (Index i = 0; i < n; ++i) {
    if (pop.rank[i] == 0 && pop.violation[i] <= 0.0) result.front_indices.push_back(i);
  }
  result.any_feasible = !result.front_indices.empty();
  return result;
}

EvoResult nsga2_constrained(const std::vector<ScalarFunction>& objectives,
                            const std::vector<ScalarFunction>& constraints, const Bounds& bounds,
                            const EvoConfig& cfg) {
  const Index outputs = static_cast<Index>(objectives.size() + constraints.size());
  PopulationEvaluator evaluate = [&](const Matrix& x) {
    Matrix y(x.rows(), outputs);
    for (Index i = 0; i < x.rows(); ++i) {
      const Vector xi = x.row(i).transpose();
      Index c = 0;
      for (const auto& f : objectives) y(i, c++) = f(xi);
      for (const auto& g : constraints) y(i, c++) = g(xi);
    }
    return y;
  };
  return nsga2_constrained(evaluate, static_cast<int>(objectives.size()), bounds, cfg);
}

}  // namespace pacmoo
