#pragma once

// Isotonic M-estimation: minimize sum rho((x_j - g(t_j)) / sigma) over
// nondecreasing step functions g.
//
// `fit_pava` is the production path (pool adjacent violators, each pooled
// block re-solved as a location M-estimate). `fit_minmax_oracle` evaluates
// the max-min window formula literally and exists to check it.

#include <cstddef>
#include <span>
#include <vector>

#include "isoreg/psi.hpp"
#include "isoreg/sample.hpp"
#include "isoreg/scale.hpp"

namespace isoreg {

/// Observations [start, end] (inclusive, indices into the t-sorted sample)
/// share `level`.
struct Block {
  std::size_t start;
  std::size_t end;
  double level;

  friend bool operator==(const Block&, const Block&) = default;
};

struct IsotonicFit {
  std::vector<Block> blocks;
  std::vector<double> fitted;
  std::vector<double> residuals;
  ScaleEstimate scale;
  ScoreFamily family;
  /// sum rho(residual / sigma)
  double objective;

  double sigma() const { return scale.value; }
};

/// Zero set {mu : sum psi((x_j - mu)/sigma) = 0} of a block's score sum.
/// Degenerates to a point unless psi is flat across the root (saturated
/// Huber tails, even-count L1 blocks).
struct RootInterval {
  double lo;
  double hi;
  double midpoint() const { return 0.5 * (lo + hi); }
};

RootInterval block_root_interval(std::span<const double> values, const ScoreFamily& f, double sigma);

/// Location M-estimate of a block: the midpoint of its root interval. Mean
/// for L2, median for exact L1.
double block_m_estimate(std::span<const double> values, const ScoreFamily& f, double sigma);

/// sum of psi((x_j - mu)/sigma) over observations with u <= t_j <= v.
/// An empty window sums to 0.
double s_n(const DesignSample& sample, double u, double v, double mu, const ScoreFamily& f, double sigma);

IsotonicFit fit_pava(const DesignSample& sample, const ScoreFamily& f, double sigma);

enum class OracleOrder { MaxMin, MinMax };

/// Fitted value at every observation from the window formula:
///   MaxMin: max_{u <= t} min_{v >= t} est(C(u, v))
///   MinMax: min_{v >= t} max_{u <= t} est(C(u, v))
/// O(n^2) block solves; meant for small n.
std::vector<double> minmax_levels(const DesignSample& sample, const ScoreFamily& f, double sigma,
                                  OracleOrder order = OracleOrder::MaxMin);

IsotonicFit fit_minmax_oracle(const DesignSample& sample, const ScoreFamily& f, double sigma);

/// Estimates the scale with `method`, then runs `fit_pava`.
IsotonicFit fit(const DesignSample& sample, const ScoreFamily& f, const ScaleMethod& method);

/// Right-continuous step: level at the largest t_j <= t, first level below t_1.
double predict(const IsotonicFit& fit, const DesignSample& sample, double t);

/// Rebuilds fitted values, residuals and objective from blocks.
IsotonicFit assemble_fit(const DesignSample& sample, std::vector<Block> blocks, const ScoreFamily& f,
                         ScaleEstimate scale);

}  // namespace isoreg
