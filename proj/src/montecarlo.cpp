#include "isoreg/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "isoreg/error.hpp"
#include "isoreg/parallel.hpp"
#include "isoreg/rng.hpp"
#include "isoreg/solver.hpp"

namespace isoreg {

std::vector<Estimator> standard_estimators() {
  return {
      {"L2", ScoreFamily::l2(), ScaleMethod::fixed(1.0)},
      {"L1", ScoreFamily::l1(), ScaleMethod::fixed(1.0)},
      {"M", ScoreFamily::huber(0.98), ScaleMethod::diff_m_scale()},
  };
}

const MseRow& MseTable::at(const std::string& estimator, const std::string& error, std::size_t n) const {
  for (const auto& row : rows) {
    if (row.estimator == estimator && row.error == error && row.n == n) return row;
  }
  throw std::out_of_range("no row for " + estimator + "/" + error + "/" + std::to_string(n));
}

MseTable run_experiment(const ExperimentConfig& config) {
  if (config.n < 2) throw ConfigError("sample size must be at least 2");
  if (config.replications < 1) throw ConfigError("need at least one replication");
  if (!(config.t0 > 0.0 && config.t0 < 1.0)) throw ConfigError("t0 must lie strictly inside (0, 1)");
  if (config.estimators.empty()) throw ConfigError("no estimators configured");

  const std::size_t n = config.n;
  const std::size_t reps = config.replications;
  const std::size_t k = config.estimators.size();
  std::vector<double> t(n);
  std::vector<double> mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    mean[i] = config.trend(t[i]);
  }
  const DesignSample design(t, mean);
  const double truth = config.trend(config.t0);

  // estimates[e * reps + r]
  std::vector<double> estimates(k * reps);
  parallel_for(reps, config.threads, [&](std::size_t r) {
    auto rng = replicate_stream(config.seed, config.first_replicate + r, config.lane);
    std::vector<double> x(n);
    config.error.draw(rng, x);
    for (std::size_t i = 0; i < n; ++i) x[i] += mean[i];
    const auto sample = design.with_responses(std::move(x));
    for (std::size_t e = 0; e < k; ++e) {
      const auto& est = config.estimators[e];
      estimates[e * reps + r] = predict(fit(sample, est.family, est.scale), sample, config.t0);
    }
  });

  const double rate = std::cbrt(static_cast<double>(n) * static_cast<double>(n));
  MseTable table;
  for (std::size_t e = 0; e < k; ++e) {
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = estimates[e * reps + r] - truth;
      sum += d * d;
    }
    const double mse = sum / static_cast<double>(reps);
    double spread = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = estimates[e * reps + r] - truth;
      spread += (d * d - mse) * (d * d - mse);
    }
    const double stderr_mse = reps > 1 ? std::sqrt(spread / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;
    MseRow row{config.estimators[e].label, config.error.name(), n, reps, rate * mse, rate * stderr_mse, {}};
    if (config.keep_estimates) {
      row.estimates.assign(estimates.begin() + static_cast<std::ptrdiff_t>(e * reps),
                           estimates.begin() + static_cast<std::ptrdiff_t>((e + 1) * reps));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table1 table1(std::uint64_t seed, std::size_t replications, unsigned threads, bool keep_estimates) {
  const std::vector<ErrorModel> errors{ErrorModel::normal(1.0), ErrorModel::student_t(3.0)};
  const std::vector<std::size_t> sizes{100, 500};
  Table1 out;
  std::uint32_t cell = 0;
  for (const auto& error : errors) {
    for (std::size_t n : sizes) {
      ExperimentConfig config;
      config.n = n;
      config.replications = replications;
      config.error = error;
      config.seed = seed;
      config.lane = cell++;
      config.threads = threads;
      config.keep_estimates = keep_estimates;
      auto part = run_experiment(config);
      for (auto& row : part.rows) out.mc.rows.push_back(std::move(row));
    }
  }
  for (const auto& error : errors) {
    for (const auto& est : standard_estimators()) {
      out.avar.push_back({est.label, error.name(), avar(est.family, error, 5.0, 1.0, 1.0)});
    }
  }
  return out;
}

}  // namespace isoreg
