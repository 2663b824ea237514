#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pacmoo/driver.hpp"
#include "pacmoo/trace_io.hpp"

using namespace pacmoo;

namespace {

// Small solver settings so that whole runs finish in seconds.
RunConfig quick_config(const std::string& problem, int iterations) {
  RunConfig cfg;
  cfg.problem = problem;
  cfg.iterations = iterations;
  cfg.initial_points = 6;
  cfg.pareto_samples = 3;
  cfg.rff_features = 64;
  cfg.inner_evo.population_size = 16;
  cfg.inner_evo.generations = 8;
  cfg.acquisition.pool_size = 200;
  cfg.acquisition.refine_steps = 20;
  cfg.gp_restarts = 1;
  return cfg;
}

ProblemSpec unconstrained_problem() {
  auto f = [](const Vector& x) {
    return Vector{{-x.squaredNorm(), -(x.array() - 1.0).square().sum()}};
  };
  return ProblemSpec("quadratics", Bounds(Vector::Constant(2, -1.0), Vector::Constant(2, 2.0)),
                     2, 0, f);
}

ProblemSpec infeasible_problem() {
  auto f = [](const Vector& x) { return Vector{{x[0], -x[0], -1.0 - x[1] * x[1]}}; };
  return ProblemSpec("nowhere", Bounds(Vector::Zero(2), Vector::Ones(2)), 2, 1, f);
}

std::string csv(const RunTrace& t) {
  std::ostringstream s;
  write_trace_csv(s, t);
  return s.str();
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("pool maximization finds the centre of a quadratic") {
    const Bounds b(Vector::Zero(3), Vector::Ones(3));
    BatchFunction score = [](const Matrix& x) -> Vector {
      return -(x.array() - 0.5).square().rowwise().sum().matrix();
    };
    AcquisitionBudget budget{4096, 100};
    const AcquisitionResult r = maximize_acquisition(score, b, nullptr, nullptr, budget, 1);
    CHECK_FALSE(r.used_fallback);
    CHECK((r.x.array() - 0.5).abs().maxCoeff() < 0.02);
  }

  TEST_CASE("negative constraint means trigger the fallback") {
    const Bounds b(Vector::Zero(2), Vector::Ones(2));
    BatchFunction score = [](const Matrix& x) -> Vector { return x.col(0); };
    BatchFunction fallback = [](const Matrix& x) -> Vector { return x.col(1); };
    ConstraintMeans negative = [](const Matrix& x) -> Matrix {
      return Matrix::Constant(x.rows(), 2, -1.0);
    };
    const AcquisitionResult r =
        maximize_acquisition(score, b, negative, fallback, AcquisitionBudget{300, 50}, 2);
    CHECK(r.used_fallback);
    CHECK(r.x[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(maximize_acquisition(score, b, negative, nullptr, AcquisitionBudget{30, 5}, 2),
                    UsageError);
  }

  TEST_CASE("constant score returns the first pool candidate") {
    const Bounds b(Vector{{-1.0, 0.0}}, Vector{{1.0, 10.0}});
    BatchFunction flat = [](const Matrix& x) -> Vector { return Vector::Ones(x.rows()); };
    const AcquisitionResult r = maximize_acquisition(flat, b, nullptr, nullptr, {500, 30}, 7);
    CHECK(r.x == Vector(halton_pool(b, 500, 7).row(0).transpose()));
  }

  TEST_CASE("filtered candidates respect the mean constraints") {
    const Bounds b(Vector::Zero(2), Vector::Ones(2));
    BatchFunction score = [](const Matrix& x) -> Vector { return x.rowwise().sum(); };
    // Feasible mean region: x0 + x1 <= 1.
    ConstraintMeans means = [](const Matrix& x) -> Matrix {
      return (1.0 - x.rowwise().sum().array()).matrix();
    };
    const AcquisitionResult r = maximize_acquisition(score, b, means, nullptr, {1000, 100}, 3);
    CHECK_FALSE(r.used_fallback);
    CHECK(r.x.sum() <= 1.0);
    CHECK(r.x.sum() >= 0.99);
  }

  TEST_CASE("halton pool") {
    const Bounds b(Vector{{-2.0, 0.0, 5.0}}, Vector{{2.0, 1.0, 6.0}});
    const Matrix p = halton_pool(b, 256, 4);
    CHECK(p == halton_pool(b, 256, 4));
    CHECK(p != halton_pool(b, 256, 5));
    for (Index i = 0; i < p.rows(); ++i) CHECK(b.contains(p.row(i).transpose()));
    // Low discrepancy: every half of every axis holds close to half of the points.
    for (Index k = 0; k < 3; ++k) {
      const double mid = 0.5 * (b.lower[k] + b.upper[k]);
      const auto below = (p.col(k).array() < mid).count();
      CHECK(std::abs(static_cast<double>(below) - 128.0) <= 4.0);
    }
  }

  TEST_CASE("unconstrained problems never enter feasibility search") {
    const ProblemSpec p = unconstrained_problem();
    const RunTrace t = run(quick_config("", 5), p);
    REQUIRE(t.records.size() == 11);
    for (std::size_t i = 6; i < t.records.size(); ++i) {
      CHECK(t.records[i].mode == Mode::Entropy);
      CHECK(t.records[i].feasible);
    }
  }

  TEST_CASE("infeasible everywhere") {
    const ProblemSpec p = infeasible_problem();
    const RunTrace t = run(quick_config("", 20), p);
    REQUIRE(t.records.size() == 26);
    for (std::size_t i = 6; i < t.records.size(); ++i) {
      CHECK(t.records[i].mode == Mode::FeasibilitySearch);
    }
    const ParetoResult r = extract_result(t);
    CHECK(r.empty);
    CHECK(r.pareto_set.empty());
    CHECK(t.records.back().phv == 0.0);
  }

  TEST_CASE("runs are reproducible") {
    RunConfig cfg = quick_config("bnh", 40);
    cfg.initial_points = 10;
    cfg.seed = 17;
    const RunTrace a = run(cfg);
    const RunTrace b = run(cfg);
    CHECK(csv(a) == csv(b));
    cfg.seed = 18;
    CHECK(csv(run(cfg)) != csv(a));
  }

  TEST_CASE("trace invariants on a scarce benchmark") {
    RunConfig cfg = quick_config("bnh-scarce", 15);
    cfg.seed = 3;
    const RunTrace t = run(cfg);
    const ProblemSpec p = make_benchmark("bnh-scarce");
    REQUIRE(t.records.size() == 21);
    bool seen_feasible = false;
    double phv = 0.0;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      const IterationRecord& r = t.records[i];
      CHECK(r.iteration == static_cast<int>(i));
      CHECK(p.bounds().contains(r.x));
      CHECK(r.feasible == evaluate(p, r.x).feasible);
      CHECK(r.phv >= phv);
      phv = r.phv;
      if (i >= 6) {
        if (!seen_feasible) {
          CHECK(r.mode == Mode::FeasibilitySearch);
        } else if (r.mode != Mode::Entropy) {
          // Only the documented fallbacks may leave entropy mode once data is feasible.
          CHECK(r.mode == Mode::FeasibilitySearch);
          CHECK_FALSE(t.notes.empty());
        }
      } else {
        CHECK(r.mode == Mode::Init);
      }
      seen_feasible = seen_feasible || r.feasible;
    }
    for (const Vector& x : extract_result(t).pareto_set) {
      CHECK(evaluate(p, x).feasible);
      CHECK(p.bounds().contains(x));
    }
  }

  TEST_CASE("provided feasible initialization") {
    RunConfig cfg = quick_config("bnh-scarce", 2);
    cfg.init_mode = InitMode::ProvidedFeasible;
    const RunTrace t = run(cfg);
    for (int i = 0; i < cfg.initial_points; ++i) CHECK(t.records[i].feasible);
    CHECK(t.records[cfg.initial_points].mode == Mode::Entropy);
  }

  TEST_CASE("random baseline") {
    RunConfig cfg = quick_config("bnh", 30);
    cfg.algorithm = Algorithm::Random;
    cfg.seed = 5;
    const RunTrace a = run(cfg);
    CHECK(csv(a) == csv(run(cfg)));
    REQUIRE(a.records.size() == 36);
    for (std::size_t i = 1; i < a.records.size(); ++i) {
      CHECK(a.records[i].phv >= a.records[i - 1].phv);
      CHECK(a.records[i].mode == (i < 6 ? Mode::Init : Mode::Random));
    }
    // Shares the initial design with the other algorithms.
    cfg.algorithm = Algorithm::PacMoo;
    cfg.iterations = 1;
    const RunTrace b = run(cfg);
    for (int i = 0; i < 6; ++i) CHECK(a.records[i].x == b.records[i].x);
  }

  TEST_CASE("direct NSGA-II baseline stops at the evaluation budget") {
    RunConfig cfg = quick_config("srn", 25);
    cfg.algorithm = Algorithm::Nsga2Direct;
    cfg.seed = 2;
    const RunTrace a = run(cfg);
    REQUIRE(a.records.size() == 31);
    CHECK(csv(a) == csv(run(cfg)));
    cfg.algorithm = Algorithm::Random;
    const RunTrace r = run(cfg);
    for (int i = 0; i < 6; ++i) {
      CHECK(a.records[i].x == r.records[i].x);
      CHECK(a.records[i].mode == Mode::Init);
    }
    for (std::size_t i = 6; i < a.records.size(); ++i) CHECK(a.records[i].mode == Mode::Evolutionary);
  }

  TEST_CASE("extract result") {
    RunTrace t;
    t.num_objectives = 2;
    t.num_constraints = 1;
    t.dim = 1;
    auto add = [&](double x, double f1, double f2, bool feasible) {
      IterationRecord r;
      r.x = Vector{{x}};
      r.y = Vector{{f1, f2, feasible ? 1.0 : -1.0}};
      r.feasible = feasible;
      t.records.push_back(r);
    };
    add(0.0, 5, 5, false);
    CHECK(extract_result(t).empty);
    add(1.0, 1, 1, true);
    ParetoResult one = extract_result(t);
    CHECK_FALSE(one.empty);
    REQUIRE(one.pareto_set.size() == 1);
    CHECK(one.pareto_set[0] == Vector{{1.0}});

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    t.records.clear();
    for (int i = 0; i < 50; ++i) add(i, u(rng), u(rng), u(rng) < 0.6);
    std::vector<Index> feasible;
    for (int i = 0; i < 50; ++i) {
      if (t.records[i].feasible) feasible.push_back(i);
    }
    Matrix obj(static_cast<Index>(feasible.size()), 2);
    for (std::size_t i = 0; i < feasible.size(); ++i) obj.row(i) = t.records[feasible[i]].y.head(2);
    const auto expected = oracle::brute_force_front(obj);
    const ParetoResult r = extract_result(t);
    REQUIRE(r.pareto_set.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(r.pareto_set[i][0] == static_cast<double>(feasible[expected[i]]));
      CHECK(r.pareto_front.row(i) == obj.row(expected[i]));
    }
  }

  TEST_CASE("progress annotation with a data-derived reference point") {
    RunTrace t;
    t.num_objectives = 2;
    auto add = [&](double f1, double f2, bool feasible) {
      IterationRecord r;
      r.x = Vector::Zero(1);
      r.y = Vector{{f1, f2}};
      r.feasible = feasible;
      t.records.push_back(r);
    };
    add(10, 10, false);
    add(0, 2, true);
    add(2, 0, true);
    add(1, 1, true);
    annotate_progress(t);
    // min feasible (0, 0) minus 1% of the range (2, 2)
    CHECK(t.reference_point[0] == doctest::Approx(-0.02));
    CHECK(std::isnan(t.records[0].best_objectives[0]));
    CHECK(t.records[0].phv == 0.0);
    CHECK(t.records[2].best_objectives == Vector{{2.0, 2.0}});
    // Staircase {(0,2), (1,1), (2,0)} over (-r, -r), swept left to right.
    const double r = 0.02;
    CHECK(t.records[3].phv == doctest::Approx(r * (2 + r) + (1 + r) + r).epsilon(1e-12));
  }

  TEST_CASE("config validation") {
    RunConfig cfg;
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = RunConfig{};
    cfg.initial_points = 1;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = RunConfig{};
    cfg.feasible_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    CHECK(parse_algorithm("nsga2-direct") == Algorithm::Nsga2Direct);
    CHECK_THROWS_AS(parse_algorithm("cmaes"), UsageError);
    CHECK(parse_init_mode("provided-feasible") == InitMode::ProvidedFeasible);
    CHECK(AcquisitionBudget{}.resolved_pool_size(3) == 6000);
    CHECK(AcquisitionBudget{}.resolved_pool_size(20) == 20000);
  }
}
