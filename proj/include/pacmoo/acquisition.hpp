#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pacmoo/evo.hpp"
#include "pacmoo/gp.hpp"

namespace pacmoo {

/// One sampled constrained Pareto front: rows are members (objectives then constraints of
/// the sampled functions), plus the per-component maxima that upper-bound each output.
struct ParetoFrontSample {
  Matrix members;
  Vector max_per_component;

  /// Builds a sample from a nonempty member matrix.
  static ParetoFrontSample from_members(Matrix members);
};

/// Independent surrogates for the K objectives and L constraints.
struct SurrogateBundle {
  std::vector<GpModel> objective_models;
  std::vector<GpModel> constraint_models;

  int num_objectives() const { return static_cast<int>(objective_models.size()); }
  int num_constraints() const { return static_cast<int>(constraint_models.size()); }
  int num_outputs() const { return num_objectives() + num_constraints(); }
  const GpModel& model(int output) const;

  /// Predictive means and standard deviations, N x (K+L), rows = points.
  void predict(const Matrix& x, Matrix& mean, Matrix& stddev) const;
};

/// Simplex weights over (f_1..f_K, c_1..c_L).
class PreferenceVector {
 public:
  /// Validates weights in [0, 1] summing to 1 within 1e-9.
  PreferenceVector(Vector weights, int num_objectives);

  /// Equal weight 1 / (K + L) on every output.
  static PreferenceVector uniform(int num_objectives, int num_constraints);

  const Vector& weights() const { return weights_; }
  int num_objectives() const { return num_objectives_; }
  double objective_mass() const { return weights_.head(num_objectives_).sum(); }
  double constraint_mass() const { return weights_.tail(weights_.size() - num_objectives_).sum(); }

 private:
  Vector weights_;
  int num_objectives_;
};

/// Objective weights = block_mass * objective_prefs; the remaining mass is split equally over
/// the constraints. Without a block mass the split is balanced (1/2 each). With no constraints
/// the objective prefs are used as-is.
PreferenceVector make_preferences(const Vector& objective_prefs, int num_constraints,
                                  std::optional<double> block_mass = std::nullopt);

/// Objective prefs putting `share` on one objective and splitting the rest equally.
Vector preferred_objective_prefs(int num_objectives, int preferred, double share);

struct FrontSamples {
  std::vector<ParetoFrontSample> fronts;
  int dropped = 0;

  bool all_dropped() const { return fronts.empty(); }
};

/// Draws num_samples constrained Pareto fronts: RFF posterior samples of every output, then a
/// constrained NSGA-II solve over them. Samples whose solve found no feasible member are
/// dropped and counted.
FrontSamples sample_pareto_fronts(const SurrogateBundle& bundle, const Bounds& bounds,
                                  int num_samples, int num_features, const EvoConfig& evo,
                                  std::uint64_t seed);

/// Raises every front's per-component maxima to at least `floor` (one entry per output).
/// A sampled maximum below an already observed value would make the truncation bound
/// contradict the data.
void raise_front_maxima(std::vector<ParetoFrontSample>& fronts, const Vector& floor);

/// Differential entropy of N(mu, sigma^2).
double gaussian_entropy(double sigma);

/// Entropy of the factorized predictive Gaussian over all K+L outputs at x.
double entropy_unconditioned(const SurrogateBundle& bundle, const Vector& x);

/// Entropy of the outputs at x when each is upper-truncated at the front's maxima.
double entropy_conditioned(const SurrogateBundle& bundle, const Vector& x,
                           const ParetoFrontSample& front);

/// Sum over samples of the truncation information gain at gamma_s = (y*_s - mu) / sigma.
double af_component(double mu, double sigma, std::span<const double> upper_bounds);

/// Per-output information gain averaged over the fronts: N x (K+L), rows = points.
Matrix acquisition_components(const SurrogateBundle& bundle, const Matrix& x,
                              const std::vector<ParetoFrontSample>& fronts);

/// Unweighted acquisition: sum of the per-sample-mean components.
double acquisition_sum(const SurrogateBundle& bundle, const Vector& x,
                       const std::vector<ParetoFrontSample>& fronts);

/// Preference-weighted acquisition: sum_i p_i * component_i.
double acquisition_preference(const SurrogateBundle& bundle, const Vector& x,
                              const std::vector<ParetoFrontSample>& fronts,
                              const PreferenceVector& preferences);

/// Probability that every constraint is satisfied, prod_i Phi(mu_i / sigma_i); 1 when L = 0.
double acquisition_feasibility(const SurrogateBundle& bundle, const Vector& x);

/// Row-wise batch version of acquisition_feasibility.
Vector acquisition_feasibility(const SurrogateBundle& bundle, const Matrix& x);

}  // namespace pacmoo
