#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "isoreg/error.hpp"
#include "isoreg/montecarlo.hpp"
#include "isoreg/parallel.hpp"
#include "isoreg/rng.hpp"
#include "isoreg/solver.hpp"

using namespace isoreg;

TEST_CASE("noise-free data is fitted exactly") {
  ExperimentConfig cfg;
  cfg.n = 99;
  cfg.replications = 3;
  cfg.error = ErrorModel::point_mass();
  const auto table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) CHECK(row.scaled_mse == 0.0);
}

TEST_CASE("rows recomputed from kept estimates") {
  ExperimentConfig cfg;
  cfg.n = 60;
  cfg.replications = 40;
  cfg.seed = 5;
  cfg.keep_estimates = true;
  const auto table = run_experiment(cfg);
  for (const auto& row : table.rows) {
    REQUIRE(row.estimates.size() == 40);
    double sum = 0.0;
    for (double e : row.estimates) sum += (e - 11.25) * (e - 11.25);
    CHECK(row.scaled_mse == doctest::Approx(std::pow(60.0, 2.0 / 3.0) * sum / 40.0).epsilon(1e-12));
    CHECK(row.mc_stderr > 0.0);
    CHECK(row.error == "normal");
    CHECK(row.n == 60);
  }

  // Replicate 7 rebuilt by hand from its stream.
  auto rng = replicate_stream(5, 7, 0);
  std::vector<double> t(60);
  std::vector<double> x(60);
  ErrorModel::normal().draw(rng, x);
  for (std::size_t i = 0; i < 60; ++i) {
    t[i] = (i + 1.0) / 61.0;
    x[i] += 10.0 + 5.0 * t[i] * t[i];
  }
  const DesignSample s(t, x);
  const auto m = fit(s, ScoreFamily::huber(0.98), ScaleMethod::diff_m_scale());
  CHECK(table.at("M", "normal", 60).estimates[7] == predict(m, s, 0.5));
}

TEST_CASE("results do not depend on threads or on splitting the run") {
  ExperimentConfig cfg;
  cfg.n = 50;
  cfg.replications = 64;
  cfg.seed = 9;
  cfg.error = ErrorModel::student_t(3.0);
  cfg.keep_estimates = true;
  cfg.threads = 1;
  const auto serial = run_experiment(cfg);
  cfg.threads = 8;
  const auto parallel = run_experiment(cfg);
  cfg.replications = 32;
  const auto first = run_experiment(cfg);
  cfg.first_replicate = 32;
  const auto second = run_experiment(cfg);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(serial.rows[e].scaled_mse == parallel.rows[e].scaled_mse);
    CHECK(serial.rows[e].estimates == parallel.rows[e].estimates);
    auto joined = first.rows[e].estimates;
    joined.insert(joined.end(), second.rows[e].estimates.begin(), second.rows[e].estimates.end());
    CHECK(joined == serial.rows[e].estimates);
  }
}

TEST_CASE("table layout") {
  const auto t = table1(1, 4, 0);
  CHECK(t.mc.rows.size() == 12);
  CHECK(t.avar.size() == 6);
  CHECK_NOTHROW(t.mc.at("L1", "student:df=3", 500));
  CHECK_THROWS_AS(t.mc.at("L1", "student:df=3", 200), std::out_of_range);
  CHECK(t.avar[0].estimator == "L2");
  CHECK(t.avar[0].report.avar == doctest::Approx(1.9157).epsilon(1e-4));
}

TEST_CASE("experiment configuration errors") {
  ExperimentConfig cfg;
  cfg.n = 1;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.t0 = 1.0;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.estimators.clear();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 37) throw DomainError("boom");
                               }),
                  DomainError);
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 6, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::all_of(hit.begin(), hit.end(), [](int v) { return v == 1; }));
}

TEST_CASE("noise-free bias vanishes at n = 500") {
  ExperimentConfig cfg;
  cfg.n = 500;
  cfg.replications = 1;
  cfg.error = ErrorModel::point_mass();
  for (const auto& row : run_experiment(cfg).rows) CHECK(row.scaled_mse < 0.05);
}
