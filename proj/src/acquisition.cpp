#include "pacmoo/acquisition.hpp"

#include <cmath>
#include <numbers>

#include "pacmoo/rff.hpp"
#include "pacmoo/special.hpp"

namespace pacmoo {

namespace {

constexpr double kSimplexTolerance = 1e-9;

Matrix predict_components(const SurrogateBundle& bundle, const Vector& x, Matrix& stddev) {
  Matrix mean;
  bundle.predict(Matrix(x.transpose()), mean, stddev);
  return mean;
}

}  // namespace

ParetoFrontSample ParetoFrontSample::from_members(Matrix members) {
  if (members.rows() == 0) throw UsageError("ParetoFrontSample: members must be nonempty");
  ParetoFrontSample s;
  s.max_per_component = members.colwise().maxCoeff().transpose();
  s.members = std::move(members);
  return s;
}

const GpModel& SurrogateBundle::model(int output) const {
  if (output < num_objectives()) return objective_models.at(output);
  return constraint_models.at(output - num_objectives());
}

void SurrogateBundle::predict(const Matrix& x, Matrix& mean, Matrix& stddev) const {
  mean.resize(x.rows(), num_outputs());
  stddev.resize(x.rows(), num_outputs());
  Vector mu, sd;
  for (int j = 0; j < num_outputs(); ++j) {
    model(j).predict(x, mu, sd);
    mean.col(j) = mu;
    stddev.col(j) = sd;
  }
}

PreferenceVector::PreferenceVector(Vector weights, int num_objectives)
    : weights_(std::move(weights)), num_objectives_(num_objectives) {
  if (num_objectives_ < 0 || num_objectives_ > weights_.size()) {
    throw UsageError("PreferenceVector: objective count out of range");
  }
  if ((weights_.array() < 0.0).any() || (weights_.array() > 1.0).any()) {
    throw UsageError("PreferenceVector: weights must lie in [0, 1]");
  }
  if (std::abs(weights_.sum() - 1.0) > kSimplexTolerance) {
    throw UsageError("PreferenceVector: weights must sum to 1");
  }
}

PreferenceVector PreferenceVector::uniform(int num_objectives, int num_constraints) {
  const int n = num_objectives + num_constraints;
  return PreferenceVector(Vector::Constant(n, 1.0 / n), num_objectives);
}

PreferenceVector make_preferences(const Vector& objective_prefs, int num_constraints,
                                  std::optional<double> block_mass) {
  if ((objective_prefs.array() < 0.0).any() ||
      std::abs(objective_prefs.sum() - 1.0) > kSimplexTolerance) {
    throw UsageError("make_preferences: objective preferences must form a simplex vector");
  }
  const int k = static_cast<int>(objective_prefs.size());
  if (num_constraints == 0) return PreferenceVector(objective_prefs, k);
  const double mass = block_mass.value_or(0.5);
  if (!(mass > 0.0 && mass < 1.0)) {
    throw UsageError("make_preferences: objective block mass must lie in (0, 1)");
  }
  Vector w(k + num_constraints);
  w.head(k) = mass * objective_prefs;
  w.tail(num_constraints).setConstant((1.0 - mass) / num_constraints);
  return PreferenceVector(w, k);
}

Vector preferred_objective_prefs(int num_objectives, int preferred, double share) {
  if (preferred < 0 || preferred >= num_objectives) {
    throw UsageError("preferred_objective_prefs: preferred objective out of range");
  }
  if (!(share >= 0.0 && share <= 1.0)) {
    throw UsageError("preferred_objective_prefs: share must lie in [0, 1]");
  }
  Vector prefs = Vector::Constant(num_objectives, (1.0 - share) / (num_objectives - 1));
  prefs[preferred] = share;
  return prefs;
}

FrontSamples sample_pareto_fronts(const SurrogateBundle& bundle, const Bounds& bounds,
                                  int num_samples, int num_features, const EvoConfig& evo,
                                  std::uint64_t seed) {
  if (num_samples < 1) throw UsageError("sample_pareto_fronts: num_samples must be >= 1");
  const int outputs = bundle.num_outputs();
  const int k = bundle.num_objectives();
  std::vector<std::optional<ParetoFrontSample>> slots(num_samples);

  parallel_for(num_samples, [&](Index s) {
    const std::uint64_t sample_seed = derive_seed(seed, static_cast<std::uint64_t>(s));
    std::vector<SampledFunction> functions;
    functions.reserve(outputs);
    for (int j = 0; j < outputs; ++j) {
      functions.push_back(sample_posterior_function(bundle.model(j), num_features,
                                                    derive_seed(sample_seed, j)));
    }
    PopulationEvaluator evaluate = [&](const Matrix& x) {
      Matrix y(x.rows(), outputs);
      for (int j = 0; j < outputs; ++j) y.col(j) = functions[j].evaluate(x);
      return y;
    };
    EvoConfig cfg = evo;
    cfg.seed = derive_seed(sample_seed, 1000);
    const EvoResult result = nsga2_constrained(evaluate, k, bounds, cfg);
    if (!result.any_feasible) return;
    Matrix members(result.front_indices.size(), outputs);
    for (std::size_t i = 0; i < result.front_indices.size(); ++i) {
      members.row(i) = result.outputs.row(result.front_indices[i]);
    }
    slots[s] = ParetoFrontSample::from_members(std::move(members));
  });

  FrontSamples out;
  for (auto& slot : slots) {
    if (slot) {
      out.fronts.push_back(std::move(*slot));
    } else {
      ++out.dropped;
    }
  }
  return out;
}

void raise_front_maxima(std::vector<ParetoFrontSample>& fronts, const Vector& floor) {
  for (auto& f : fronts) {
    if (f.max_per_component.size() != floor.size()) {
      throw UsageError("raise_front_maxima: floor length mismatch");
    }
    f.max_per_component = f.max_per_component.cwiseMax(floor);
  }
}

double gaussian_entropy(double sigma) {
  return 0.5 * (1.0 + std::log(2.0 * std::numbers::pi)) + std::log(sigma);
}

double entropy_unconditioned(const SurrogateBundle& bundle, const Vector& x) {
  Matrix sd;
  predict_components(bundle, x, sd);
  double h = 0.0;
  for (Index j = 0; j < sd.cols(); ++j) h += gaussian_entropy(sd(0, j));
  return h;
}

double entropy_conditioned(const SurrogateBundle& bundle, const Vector& x,
                           const ParetoFrontSample& front) {
  Matrix sd;
  const Matrix mu = predict_components(bundle, x, sd);
  double h = 0.0;
  for (Index j = 0; j < sd.cols(); ++j) {
    const double gamma = (front.max_per_component[j] - mu(0, j)) / sd(0, j);
    h += gaussian_entropy(sd(0, j)) + stats::log_normal_cdf(gamma) -
         0.5 * gamma * stats::normal_hazard(gamma);
  }
  return h;
}

double af_component(double mu, double sigma, std::span<const double> upper_bounds) {
  double total = 0.0;
  for (double bound : upper_bounds) total += stats::truncation_gain((bound - mu) / sigma);
  return total;
}

Matrix acquisition_components(const SurrogateBundle& bundle, const Matrix& x,
                              const std::vector<ParetoFrontSample>& fronts) {
  if (fronts.empty()) throw UsageError("acquisition_components: no front samples");
  Matrix mean, sd;
  bundle.predict(x, mean, sd);
  const int outputs = bundle.num_outputs();
  std::vector<std::vector<double>> bounds(outputs);
  for (int j = 0; j < outputs; ++j) {
    for (const auto& f : fronts) bounds[j].push_back(f.max_per_component[j]);
  }
  Matrix components(x.rows(), outputs);
  const double inv_s = 1.0 / static_cast<double>(fronts.size());
  for (Index i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < outputs; ++j) {
      components(i, j) = inv_s * af_component(mean(i, j), sd(i, j), bounds[j]);
    }
  }
  return components;
}

double acquisition_sum(const SurrogateBundle& bundle, const Vector& x,
                       const std::vector<ParetoFrontSample>& fronts) {
  return acquisition_components(bundle, Matrix(x.transpose()), fronts).sum();
}

double acquisition_preference(const SurrogateBundle& bundle, const Vector& x,
                              const std::vector<ParetoFrontSample>& fronts,
                              const PreferenceVector& preferences) {
  if (preferences.weights().size() != bundle.num_outputs()) {
    throw UsageError("acquisition_preference: preference vector length mismatch");
  }
  return (acquisition_components(bundle, Matrix(x.transpose()), fronts) * preferences.weights())(0);
}

Vector acquisition_feasibility(const SurrogateBundle& bundle, const Matrix& x) {
  Vector log_prob = Vector::Zero(x.rows());
  Vector mu, sd;
  for (const auto& model : bundle.constraint_models) {
    model.predict(x, mu, sd);
    for (Index i = 0; i < x.rows(); ++i) log_prob[i] += stats::log_normal_cdf(mu[i] / sd[i]);
  }
  return log_prob.array().exp().matrix();
}

double acquisition_feasibility(const SurrogateBundle& bundle, const Vector& x) {
  return acquisition_feasibility(bundle, Matrix(x.transpose()))[0];
}

}  // namespace pacmoo
