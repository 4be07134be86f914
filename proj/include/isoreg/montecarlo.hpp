#pragma once

// Finite-sample study of isotonic estimators of mu(t0): draws x_i = mu(t_i)
// + u_i on the grid t_i = i/(n+1), fits every estimator to the same draws,
// and reports n^{2/3} * mean squared error at t0.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "isoreg/asymptotics.hpp"
#include "isoreg/psi.hpp"
#include "isoreg/scale.hpp"

namespace isoreg {

/// mu(t) = 10 + 5 t^2.
class Trend {
 public:
  static Trend quadratic() { return Trend{}; }
  double operator()(double t) const { return 10.0 + 5.0 * t * t; }
  double derivative(double t) const { return 10.0 * t; }
  std::string name() const { return "10+5t^2"; }
};

struct Estimator {
  std::string label;
  ScoreFamily family;
  ScaleMethod scale;
};

/// L2, exact L1, and Huber k = 0.98 with the difference-based M-scale
/// (c = 0.7094, b = 3/4).
std::vector<Estimator> standard_estimators();

struct ExperimentConfig {
  std::size_t n = 100;
  std::size_t replications = 500;
  /// Index of the first replicate; lets a run be split into pieces that
  /// reuse the same per-replicate streams.
  std::size_t first_replicate = 0;
  double t0 = 0.5;
  Trend trend = Trend::quadratic();
  ErrorModel error = ErrorModel::normal();
  std::vector<Estimator> estimators = standard_estimators();
  std::uint64_t seed = 0;
  /// Separates streams of experiments that share a seed.
  std::uint32_t lane = 0;
  unsigned threads = 0;
  bool keep_estimates = false;
};

struct MseRow {
  std::string estimator;
  std::string error;
  std::size_t n;
  std::size_t replications;
  /// n^{2/3} mean((mu_hat(t0) - mu(t0))^2)
  double scaled_mse;
  double mc_stderr;
  /// Raw mu_hat(t0) per replicate when keep_estimates is set.
  std::vector<double> estimates;
};

struct MseTable {
  std::vector<MseRow> rows;

  /// Throws std::out_of_range when absent.
  const MseRow& at(const std::string& estimator, const std::string& error, std::size_t n) const;
};

/// Deterministic for a fixed config: replicate r uses stream (seed, r, lane) and
/// rows are aggregated in replicate order regardless of thread count.
MseTable run_experiment(const ExperimentConfig& config);

struct AvarEntry {
  std::string estimator;
  std::string error;
  AvarReport report;
};

struct Table1 {
  MseTable mc;
  std::vector<AvarEntry> avar;
};

/// {L2, L1, M} x {normal, t3} x {100, 500}, plus the asymptotic variance of
/// each (estimator, error) pair at mu'(t0) = 5, h(t0) = 1, sigma0 = 1.
/// Student t errors are raw t3 (variance 3).
Table1 table1(std::uint64_t seed, std::size_t replications = 500, unsigned threads = 0,
              bool keep_estimates = false);

}  // namespace isoreg
