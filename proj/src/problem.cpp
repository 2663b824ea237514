#include "pacmoo/problem.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace pacmoo {

ProblemSpec::ProblemSpec(std::string name, Bounds bounds, int num_objectives, int num_constraints,
                         Evaluator evaluator)
    : name_(std::move(name)),
      bounds_(std::move(bounds)),
      num_objectives_(num_objectives),
      num_constraints_(num_constraints),
      evaluator_(std::move(evaluator)) {
  if (num_objectives_ < 2) throw UsageError("ProblemSpec: at least two objectives required");
  if (num_constraints_ < 0) throw UsageError("ProblemSpec: negative constraint count");
  if (!evaluator_) throw UsageError("ProblemSpec: missing evaluator");
}

void ProblemSpec::set_reference_point(Vector r) {
  if (r.size() != num_objectives_) {
    throw UsageError("ProblemSpec: reference point must have one entry per objective");
  }
  reference_point_ = std::move(r);
}

bool is_feasible(const Vector& y, int num_objectives) {
  for (Index i = num_objectives; i < y.size(); ++i) {
    if (!(y[i] >= 0.0)) return false;
  }
  return true;
}

Observation evaluate(const ProblemSpec& problem, const Vector& x) {
  if (!problem.bounds().contains(x)) {
    throw BoundsError("evaluate: point outside the bounds of problem '" + problem.name() + "'");
  }
  Observation obs;
  obs.x = x;
  obs.y = problem.evaluator()(x);
  if (obs.y.size() != problem.num_outputs()) {
    throw UsageError("evaluate: evaluator returned the wrong number of outputs");
  }
  obs.feasible = is_feasible(obs.y, problem.num_objectives());
  return obs;
}

Observation evaluate_noisy(const ProblemSpec& problem, const Vector& x, const Vector& noise_std,
                           std::mt19937_64& rng) {
  Observation obs = evaluate(problem, x);
  if (noise_std.size() == 0) return obs;
  if (noise_std.size() != problem.num_outputs()) {
    throw UsageError("evaluate_noisy: noise_std must have K+L entries");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < obs.y.size(); ++i) {
    if (noise_std[i] > 0.0) obs.y[i] += noise_std[i] * normal(rng);
  }
  obs.feasible = is_feasible(obs.y, problem.num_objectives());
  return obs;
}

void Dataset::add(Observation obs) {
  if (!problem_->bounds().contains(obs.x)) {
    throw BoundsError("Dataset: observation outside bounds");
  }
  observations_.push_back(std::move(obs));
}

bool Dataset::has_feasible() const {
  for (const auto& o : observations_) {
    if (o.feasible) return true;
  }
  return false;
}

Matrix Dataset::inputs() const {
  Matrix x(size(), problem_->dim());
  for (Index i = 0; i < size(); ++i) x.row(i) = observations_[i].x.transpose();
  return x;
}

Matrix Dataset::outputs() const {
  Matrix y(size(), problem_->num_outputs());
  for (Index i = 0; i < size(); ++i) y.row(i) = observations_[i].y.transpose();
  return y;
}

namespace {

// Classic constrained test problems, published as minimization with g(x) <= 0 or
// similar; each evaluator below returns negated objectives and c(x) >= 0 constraints.

Vector bnh(const Vector& x) {
  const double f1 = 4 * x[0] * x[0] + 4 * x[1] * x[1];
  const double f2 = std::pow(x[0] - 5, 2) + std::pow(x[1] - 5, 2);
  const double c1 = 25 - std::pow(x[0] - 5, 2) - x[1] * x[1];
  const double c2 = std::pow(x[0] - 8, 2) + std::pow(x[1] + 3, 2) - 7.7;
  return Vector{{-f1, -f2, c1, c2}};
}

Vector srn(const Vector& x) {
  const double f1 = 2 + std::pow(x[0] - 2, 2) + std::pow(x[1] - 1, 2);
  const double f2 = 9 * x[0] - std::pow(x[1] - 1, 2);
  const double c1 = 225 - x[0] * x[0] - x[1] * x[1];
  const double c2 = 3 * x[1] - x[0] - 10;
  return Vector{{-f1, -f2, c1, c2}};
}

Vector tnk(const Vector& x) {
  const double c1 = x[0] * x[0] + x[1] * x[1] - 1 - 0.1 * std::cos(16 * std::atan2(x[0], x[1]));
  const double c2 = 0.5 - std::pow(x[0] - 0.5, 2) - std::pow(x[1] - 0.5, 2);
  return Vector{{-x[0], -x[1], c1, c2}};
}

Vector osy(const Vector& x) {
  const double f1 = -(25 * std::pow(x[0] - 2, 2) + std::pow(x[1] - 2, 2) + std::pow(x[2] - 1, 2) +
                      std::pow(x[3] - 4, 2) + std::pow(x[4] - 1, 2));
  const double f2 = x.squaredNorm();
  Vector y(8);
  y << -f1, -f2, x[0] + x[1] - 2, 6 - x[0] - x[1], 2 - x[1] + x[0], 2 - x[0] + 3 * x[1],
      4 - std::pow(x[2] - 3, 2) - x[3], std::pow(x[4] - 3, 2) + x[5] - 4;
  return y;
}

struct Registration {
  const char* name;
  const char* base;
  std::optional<double> scarce_target;
};

constexpr double kScarceFraction = 0.04;
constexpr std::uint64_t kRegistrySeed = 0x5eed0fb0a7cULL;

const Registration kRegistry[] = {
    {"bnh", "bnh", std::nullopt},
    {"srn", "srn", std::nullopt},
    {"tnk", "tnk", std::nullopt},
    {"osy", "osy", std::nullopt},
    {"bnh-scarce", "bnh", kScarceFraction},
    {"srn-scarce", "srn", kScarceFraction},
    {"tnk-scarce", "tnk", kScarceFraction},
    {"osy-scarce", "osy", kScarceFraction},
};

ProblemSpec make_base(std::string_view base) {
  if (base == "bnh") return ProblemSpec("bnh", Bounds(Vector{{0, 0}}, Vector{{5, 3}}), 2, 2, bnh);
  if (base == "srn") {
    return ProblemSpec("srn", Bounds(Vector{{-20, -20}}, Vector{{20, 20}}), 2, 2, srn);
  }
  if (base == "tnk") {
    const double pi = std::numbers::pi;
    return ProblemSpec("tnk", Bounds(Vector{{0, 0}}, Vector{{pi, pi}}), 2, 2, tnk);
  }
  if (base == "osy") {
    return ProblemSpec("osy", Bounds(Vector{{0, 0, 1, 0, 1, 0}}, Vector{{10, 10, 5, 6, 5, 10}}), 2,
                       6, osy);
  }
  throw RegistryError("unknown benchmark '" + std::string(base) + "'");
}

Matrix uniform_samples(const Bounds& bounds, long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix x(n, bounds.dim());
  for (long i = 0; i < n; ++i) {
    for (Index j = 0; j < bounds.dim(); ++j) {
      x(i, j) = bounds.lower[j] + unit(rng) * (bounds.upper[j] - bounds.lower[j]);
    }
  }
  return x;
}

// Worst feasible value per objective over a fixed uniform sample, minus 1% of the range.
Vector nadir_reference(const ProblemSpec& problem) {
  const long n = 200000;
  const Matrix x = uniform_samples(problem.bounds(), n, kRegistrySeed ^ 0xabcdULL);
  const int k = problem.num_objectives();
  Vector lo = Vector::Constant(k, std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(k, -std::numeric_limits<double>::infinity());
  long feasible = 0;
  for (long i = 0; i < n; ++i) {
    const Vector y = problem.evaluator()(x.row(i).transpose());
    if (!is_feasible(y, k)) continue;
    ++feasible;
    lo = lo.cwiseMin(y.head(k));
    hi = hi.cwiseMax(y.head(k));
  }
  if (feasible == 0) return Vector::Zero(k);
  const Vector range = (hi - lo).cwiseMax(1e-12);
  return lo - 0.01 * range;
}

}  // namespace

std::vector<std::string> benchmark_names() {
  std::vector<std::string> names;
  for (const auto& r : kRegistry) names.emplace_back(r.name);
  return names;
}

double estimate_feasible_fraction(const ProblemSpec& problem, long n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw UsageError("estimate_feasible_fraction: n_samples must be >= 1");
  if (problem.num_constraints() == 0) return 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Bounds& b = problem.bounds();
  Vector x(b.dim());
  long feasible = 0;
  for (long i = 0; i < n_samples; ++i) {
    for (Index j = 0; j < b.dim(); ++j) x[j] = b.lower[j] + unit(rng) * (b.upper[j] - b.lower[j]);
    if (is_feasible(problem.evaluator()(x), problem.num_objectives())) ++feasible;
  }
  return static_cast<double>(feasible) / static_cast<double>(n_samples);
}

ProblemSpec tighten_constraints(const ProblemSpec& problem, double target, std::uint64_t seed) {
  if (!(target > 0.0 && target <= 1.0)) {
    throw UsageError("tighten_constraints: target fraction must lie in (0, 1]");
  }
  const int k = problem.num_objectives();
  const int l = problem.num_constraints();
  if (l == 0) throw UsageError("tighten_constraints: problem has no constraints");

  const long n = 40000;
  const Matrix x = uniform_samples(problem.bounds(), n, seed);
  Matrix c(n, l);
  for (long i = 0; i < n; ++i) c.row(i) = problem.evaluator()(x.row(i).transpose()).tail(l);

  Vector scale(l);
  for (int j = 0; j < l; ++j) {
    const double mean = c.col(j).mean();
    const double sd = std::sqrt((c.col(j).array() - mean).square().mean());
    scale[j] = sd > 0.0 ? sd : 1.0;
  }
  auto fraction = [&](double shift) {
    long ok = 0;
    for (long i = 0; i < n; ++i) {
      if (((c.row(i).transpose() - shift * scale).array() >= 0.0).all()) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(n);
  };

  // fraction(shift) is non-increasing; bracket the target then bisect.
  double lo = -1.0, hi = 1.0;
  while (fraction(lo) < target && lo > -1e6) lo *= 2.0;
  while (fraction(hi) > target && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fraction(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double shift = 0.5 * (lo + hi);
  const Vector offset = shift * scale;

  auto base = problem.evaluator();
  ProblemSpec::Evaluator shifted = [base, offset, k, l](const Vector& xx) {
    Vector y = base(xx);
    y.segment(k, l) -= offset;
    return y;
  };
  return ProblemSpec(problem.name() + "-tightened", problem.bounds(), k, l, std::move(shifted));
}

ProblemSpec make_benchmark(std::string_view name, std::optional<double> feasible_fraction_target) {
  // Reference points and tightened offsets cost a few hundred thousand evaluations; cache them.
  static std::mutex cache_mutex;
  static std::map<std::pair<std::string, double>, std::shared_ptr<const ProblemSpec>> cache;

  const Registration* reg = nullptr;
  for (const auto& r : kRegistry) {
    if (name == r.name) reg = &r;
  }
  if (reg == nullptr) throw RegistryError("unknown benchmark '" + std::string(name) + "'");

  std::optional<double> target = feasible_fraction_target ? feasible_fraction_target
                                                          : reg->scarce_target;
  const auto key = std::make_pair(std::string(name), target.value_or(-1.0));
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }

  ProblemSpec base = make_base(reg->base);
  ProblemSpec spec =
      target ? tighten_constraints(base, *target, derive_seed(kRegistrySeed, 1)) : base;
  spec = ProblemSpec(std::string(name), spec.bounds(), spec.num_objectives(),
                     spec.num_constraints(), spec.evaluator());
  spec.set_reference_point(nadir_reference(spec));

  std::lock_guard lock(cache_mutex);
  cache.emplace(key, std::make_shared<const ProblemSpec>(spec));
  return spec;
}

std::vector<Vector> feasible_initial_design(const ProblemSpec& problem, int n) {
  std::mt19937_64 rng(derive_seed(kRegistrySeed, 2));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Bounds& b = problem.bounds();
  std::vector<Vector> design;
  const long max_attempts = 10000000;
  Vector x(b.dim());
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(design.size()) < n;
       ++attempt) {
    for (Index j = 0; j < b.dim(); ++j) x[j] = b.lower[j] + unit(rng) * (b.upper[j] - b.lower[j]);
    if (is_feasible(problem.evaluator()(x), problem.num_objectives())) design.push_back(x);
  }
  if (static_cast<int>(design.size()) < n) {
    throw DataError("feasible_initial_design: could not find enough feasible points for '" +
                    problem.name() + "'");
  }
  return design;
}

}  // namespace pacmoo
