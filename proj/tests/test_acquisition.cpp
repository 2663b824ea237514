#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pacmoo/acquisition.hpp"
#include "pacmoo/problem.hpp"

using namespace pacmoo;

namespace {

const Bounds kBox(Vector::Zero(2), Vector::Ones(2));

// Prior model whose predictive distribution is N(0, variance) everywhere.
GpModel flat_model(double variance = 1.0) {
  return GpModel::prior(KernelParams{Vector{{0.3, 0.3}}, variance - 1e-6, 1e-6}, kBox);
}

SurrogateBundle random_bundle(int k, int l, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SurrogateBundle b;
  for (int j = 0; j < k + l; ++j) {
    Matrix x(6, 2);
    Vector y(6);
    for (Index i = 0; i < 6; ++i) {
      x.row(i) << u(rng), u(rng);
      y[i] = 4.0 * u(rng) - 2.0;
    }
    KernelParams p{Vector{{0.1 + u(rng), 0.1 + u(rng)}}, 0.5 + u(rng), 1e-3 + 0.1 * u(rng)};
    GpModel m = GpModel::condition(p, x, y, kBox);
    (j < k ? b.objective_models : b.constraint_models).push_back(std::move(m));
  }
  return b;
}

std::vector<ParetoFrontSample> random_fronts(int outputs, int s, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.5, 1.5);
  std::vector<ParetoFrontSample> fronts;
  for (int i = 0; i < s; ++i) {
    Matrix members(3, outputs);
    for (Index r = 0; r < 3; ++r) {
      for (int c = 0; c < outputs; ++c) members(r, c) = n(rng);
    }
    fronts.push_back(ParetoFrontSample::from_members(members));
  }
  return fronts;
}

}  // namespace

TEST_SUITE("acquisition") {
  TEST_CASE("af component special values") {
    const double at_zero[] = {1.0};
    CHECK(af_component(1.0, 2.0, at_zero) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const double far[] = {8.0};
    CHECK(af_component(0.0, 1.0, far) <= 1e-12);
    const double below[] = {-1.0};
    CHECK(af_component(0.0, 1.0, below) ==
          doctest::Approx(oracle::truncated_entropy_drop(0.0, 1.0, -1.0)).epsilon(1e-8));
    const double two[] = {1.0, -1.0};
    CHECK(af_component(0.0, 1.0, two) ==
          doctest::Approx(af_component(0.0, 1.0, std::span(two, 1)) +
                          af_component(0.0, 1.0, std::span(two + 1, 1))));
  }

  TEST_CASE("af component agrees with quadrature on random triples") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double mu = 10 * u(rng) - 5, sigma = 0.05 + 3 * u(rng);
      const double y_star = mu + sigma * (16 * u(rng) - 10);
      const double bound[] = {y_star};
      CHECK(std::abs(af_component(mu, sigma, bound) -
                     oracle::truncated_entropy_drop(mu, sigma, y_star)) < 1e-7);
    }
  }

  TEST_CASE("gaussian entropy") {
    CHECK(gaussian_entropy(1.0) == doctest::Approx(1.4189385332046727).epsilon(1e-15));
    CHECK(gaussian_entropy(2.0) - gaussian_entropy(1.0) == doctest::Approx(std::log(2.0)));
  }

  TEST_CASE("unconditioned entropy of unit-variance outputs") {
    SurrogateBundle b;
    for (int j = 0; j < 2; ++j) b.objective_models.push_back(flat_model());
    b.constraint_models.push_back(flat_model());
    CHECK(std::abs(entropy_unconditioned(b, Vector{{0.2, 0.9}}) - 3 * 1.41894) < 1e-5);
  }

  TEST_CASE("sum at gamma zero") {
    SurrogateBundle b;
    b.objective_models.push_back(flat_model());
    b.constraint_models.push_back(flat_model());
    std::vector<ParetoFrontSample> fronts(4, ParetoFrontSample::from_members(Matrix::Zero(1, 2)));
    CHECK(acquisition_sum(b, Vector{{0.5, 0.5}}, fronts) ==
          doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
  }

  TEST_CASE("sum equals unconditioned minus mean conditioned entropy") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
      const SurrogateBundle b = random_bundle(2, 1 + rep % 3, rng);
      const auto fronts = random_fronts(b.num_outputs(), 1 + rep % 5, rng);
      const Vector x{{u(rng), u(rng)}};
      double conditioned = 0.0;
      for (const auto& f : fronts) conditioned += entropy_conditioned(b, x, f);
      conditioned /= static_cast<double>(fronts.size());
      const double direct = acquisition_sum(b, x, fronts);
      CHECK(std::abs(direct - (entropy_unconditioned(b, x) - conditioned)) < 1e-10);
      CHECK(direct >= 0.0);
    }
  }

  TEST_CASE("preference weighting") {
    std::mt19937_64 rng(5);
    const SurrogateBundle b = random_bundle(2, 2, rng);
    const auto fronts = random_fronts(4, 3, rng);
    const Vector x{{0.3, 0.4}};
    const Matrix comp = acquisition_components(b, Matrix(x.transpose()), fronts);
    CHECK(acquisition_preference(b, x, fronts, PreferenceVector::uniform(2, 2)) ==
          doctest::Approx(acquisition_sum(b, x, fronts) / 4).epsilon(1e-14));
    for (int j = 0; j < 4; ++j) {
      Vector w = Vector::Zero(4);
      w[j] = 1.0;
      CHECK(acquisition_preference(b, x, fronts, PreferenceVector(w, 2)) ==
            doctest::Approx(comp(0, j)).epsilon(1e-14));
    }
    // Linearity in p.
    const PreferenceVector p(Vector{{0.1, 0.2, 0.3, 0.4}}, 2);
    const PreferenceVector q(Vector{{0.4, 0.3, 0.2, 0.1}}, 2);
    const PreferenceVector mix(0.25 * p.weights() + 0.75 * q.weights(), 2);
    CHECK(acquisition_preference(b, x, fronts, mix) ==
          doctest::Approx(0.25 * acquisition_preference(b, x, fronts, p) +
                          0.75 * acquisition_preference(b, x, fronts, q))
              .epsilon(1e-13));
    CHECK_THROWS_AS(acquisition_preference(b, x, fronts, PreferenceVector::uniform(2, 1)),
                    UsageError);
  }

  TEST_CASE("argmax is invariant to uniform scaling of the weights") {
    std::mt19937_64 rng(8);
    const SurrogateBundle b = random_bundle(2, 1, rng);
    const auto fronts = random_fronts(3, 4, rng);
    Matrix grid(1000, 2);
    for (Index i = 0; i < 1000; ++i) grid.row(i) << (i % 40) / 39.0, (i / 40) / 24.0;
    const Matrix comp = acquisition_components(b, grid, fronts);
    const Vector w{{0.5, 0.3, 0.2}};
    Index a = 0, c = 0;
    (comp * w).maxCoeff(&a);
    (comp * (7.5 * w)).maxCoeff(&c);
    CHECK(a == c);
  }

  TEST_CASE("preference arithmetic of the example variants") {
    CHECK(make_preferences(Vector{{0.8, 0.2}}, 3, 0.5).weights()[0] == 0.5 * 0.8);
    CHECK(make_preferences(Vector{{0.92, 0.08}}, 3, 0.85).weights()[0] == 0.85 * 0.92);
    CHECK(make_preferences(Vector{{0.88, 0.12}}, 3, 0.65).weights()[0] == 0.65 * 0.88);
    const PreferenceVector p = make_preferences(Vector{{0.92, 0.08}}, 4, 0.85);
    CHECK(p.objective_mass() == doctest::Approx(0.85));
    CHECK(p.weights()[2] == doctest::Approx(0.15 / 4));
    CHECK(p.weights()[5] == doctest::Approx(0.15 / 4));
  }

  TEST_CASE("preference validation") {
    CHECK_THROWS_AS(make_preferences(Vector{{0.7, 0.2}}, 2), UsageError);
    CHECK_THROWS_AS(make_preferences(Vector{{1.2, -0.2}}, 2), UsageError);
    CHECK_THROWS_AS(make_preferences(Vector{{0.5, 0.5}}, 2, 1.0), UsageError);
    CHECK_THROWS_AS(PreferenceVector(Vector{{0.5, 0.6}}, 1), UsageError);
    const PreferenceVector no_constraints = make_preferences(Vector{{0.3, 0.7}}, 0);
    CHECK(no_constraints.weights() == Vector{{0.3, 0.7}});
    const PreferenceVector balanced = make_preferences(Vector{{0.5, 0.5}}, 2);
    CHECK(balanced.constraint_mass() == doctest::Approx(0.5));
    CHECK(preferred_objective_prefs(3, 1, 0.8).isApprox(Vector{{0.1, 0.8, 0.1}}, 1e-15));
  }

  TEST_CASE("feasibility probability") {
    SurrogateBundle b;
    b.objective_models = {flat_model(), flat_model()};
    CHECK(acquisition_feasibility(b, Vector{{0.1, 0.1}}) == 1.0);
    b.constraint_models.push_back(flat_model());
    CHECK(acquisition_feasibility(b, Vector{{0.1, 0.1}}) == doctest::Approx(0.5).epsilon(1e-15));
    b.constraint_models.push_back(flat_model(4.0));
    CHECK(acquisition_feasibility(b, Vector{{0.1, 0.1}}) == doctest::Approx(0.25).epsilon(1e-15));

    // mu = 2, sigma = 1: one observation of 2 far (in lengthscales) from the query point.
    SurrogateBundle c;
    c.objective_models = {flat_model(), flat_model()};
    c.constraint_models.push_back(GpModel::condition(
        KernelParams{Vector{{1e-3, 1e-3}}, 1.0 - 1e-6, 1e-6}, Matrix{{0.0, 0.0}}, Vector{{2.0}}, kBox));
    const Prediction pr = c.constraint_models[0].predict(Vector{{1.0, 1.0}});
    CHECK(pr.mean == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(pr.stddev == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(acquisition_feasibility(c, Vector{{1.0, 1.0}}) ==
          doctest::Approx(0.9772498680518208).epsilon(1e-14));
  }

  TEST_CASE("front sampling on a benchmark") {
    const ProblemSpec p = make_benchmark("bnh");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset d(p);
    for (int i = 0; i < 12; ++i) d.add(evaluate(p, Vector{{5 * u(rng), 3 * u(rng)}}));
    SurrogateBundle b;
    for (int j = 0; j < 4; ++j) {
      GpModel m = GpModel::fit(d.inputs(), d.outputs().col(j), p.bounds());
      (j < 2 ? b.objective_models : b.constraint_models).push_back(std::move(m));
    }
    EvoConfig evo;
    evo.population_size = 20;
    evo.generations = 10;
    const FrontSamples a = sample_pareto_fronts(b, p.bounds(), 4, 64, evo, 9);
    const FrontSamples c = sample_pareto_fronts(b, p.bounds(), 4, 64, evo, 9);
    REQUIRE(a.fronts.size() + a.dropped == 4);
    REQUIRE(a.fronts.size() == c.fronts.size());
    for (std::size_t s = 0; s < a.fronts.size(); ++s) {
      CHECK(a.fronts[s].members == c.fronts[s].members);
      CHECK((a.fronts[s].members.rightCols(2).array() >= 0.0).all());
      CHECK(a.fronts[s].max_per_component ==
            Vector(a.fronts[s].members.colwise().maxCoeff().transpose()));
    }
  }

  TEST_CASE("raising front maxima") {
    std::vector<ParetoFrontSample> fronts{ParetoFrontSample::from_members(Matrix{{1.0, -3.0}})};
    raise_front_maxima(fronts, Vector{{0.0, 0.0}});
    CHECK(fronts[0].max_per_component == Vector{{1.0, 0.0}});
    CHECK_THROWS_AS(raise_front_maxima(fronts, Vector::Zero(3)), UsageError);
  }
}
