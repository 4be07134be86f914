#include "isoreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isoreg/error.hpp"

namespace isoreg {
namespace {

constexpr int kMaxBisection = 200;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Sign of the block score at mu, treating sums within rounding noise of
// zero as zero.
int score_sign(std::span<const double> values, const ScoreFamily& f, double sigma, double mu) {
  double total = 0.0;
  double magnitude = 0.0;
  for (double x : values) {
    const double p = psi(f, (x - mu) / sigma);
    total += p;
    magnitude += std::fabs(p);
  }
  const double band = 8.0 * kEps * magnitude;
  if (total > band) return 1;
  if (total < -band) return -1;
  return 0;
}

bool converged(double a, double b) {
  return b - a <= 2.0 * kEps * std::max(std::fabs(a), std::fabs(b)) + std::numeric_limits<double>::min();
}

// Locates where pred flips from false (at a) to true (at b).
template <class Pred>
double boundary(double a, double b, Pred pred) {
  for (int it = 0; it < kMaxBisection && !converged(a, b); ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (pred(mid)) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return 0.5 * (a + b);
}

RootInterval exact_l1_interval(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return {upper, upper};
  return {*std::max_element(v.begin(), mid), upper};
}

std::vector<std::pair<std::size_t, std::size_t>> tie_groups(std::span<const double> t) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= t.size(); ++i) {
    if (i == t.size() || t[i] != t[start]) {
      groups.emplace_back(start, i - 1);
      start = i;
    }
  }
  return groups;
}

std::span<const double> slice(const DesignSample& sample, std::size_t start, std::size_t end) {
  return sample.x().subspan(start, end - start + 1);
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("scale must be positive and finite");
}

}  // namespace

RootInterval block_root_interval(std::span<const double> values, const ScoreFamily& f, double sigma) {
  if (values.empty()) throw EmptyBlock("block has no observations");
  check_sigma(sigma);
  if (values.size() == 1) return {values[0], values[0]};
  if (f.kind() == FamilyKind::L2) {
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return {mean, mean};
  }
  if (f.is_exact_l1()) return exact_l1_interval(values);

  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  double a = *min_it;
  double b = *max_it;
  if (a == b) return {a, a};
  auto sign = [&](double mu) { return score_sign(values, f, sigma, mu); };

  // The score is nonincreasing in mu: positive below the root set, negative
  // above it. Narrow [a, b] until a point of the root set turns up.
  if (sign(a) <= 0) {
    const double hi = sign(b) >= 0 ? b : boundary(a, b, [&](double mu) { return sign(mu) < 0; });
    return {a, hi};
  }
  if (sign(b) >= 0) {
    return {boundary(a, b, [&](double mu) { return sign(mu) <= 0; }), b};
  }
  for (int it = 0; it < kMaxBisection && !converged(a, b); ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const int s = sign(mid);
    if (s > 0) {
      a = mid;
    } else if (s < 0) {
      b = mid;
    } else {
      return {boundary(a, mid, [&](double mu) { return sign(mu) <= 0; }),
              boundary(mid, b, [&](double mu) { return sign(mu) < 0; })};
    }
  }
  return {a, b};
}

double block_m_estimate(std::span<const double> values, const ScoreFamily& f, double sigma) {
  return block_root_interval(values, f, sigma).midpoint();
}

double s_n(const DesignSample& sample, double u, double v, double mu, const ScoreFamily& f, double sigma) {
  check_sigma(sigma);
  const auto t = sample.t();
  const auto first = std::lower_bound(t.begin(), t.end(), u);
  const auto last = std::upper_bound(t.begin(), t.end(), v);
  double total = 0.0;
  for (auto it = first; it < last; ++it) {
    total += psi(f, (sample.x(static_cast<std::size_t>(it - t.begin())) - mu) / sigma);
  }
  return total;
}

IsotonicFit assemble_fit(const DesignSample& sample, std::vector<Block> blocks, const ScoreFamily& f,
                         ScaleEstimate scale) {
  const std::size_t n = sample.size();
  std::vector<double> fitted(n);
  std::vector<double> residuals(n);
  double objective = 0.0;
  for (const auto& block : blocks) {
    for (std::size_t j = block.start; j <= block.end; ++j) {
      fitted[j] = block.level;
      residuals[j] = sample.x(j) - block.level;
      objective += rho(f, residuals[j] / scale.value);
    }
  }
  return IsotonicFit{std::move(blocks), std::move(fitted), std::move(residuals), std::move(scale), f, objective};
}

IsotonicFit fit_pava(const DesignSample& sample, const ScoreFamily& f, double sigma) {
  check_sigma(sigma);
  std::vector<Block> stack;
  // Tied design points always share a fitted value, so each tie group
  // enters as one block.
  for (const auto& [start, end] : tie_groups(sample.t())) {
    stack.push_back({start, end, block_m_estimate(slice(sample, start, end), f, sigma)});
    while (stack.size() >= 2 && stack[stack.size() - 2].level >= stack.back().level) {
      const std::size_t merged_end = stack.back().end;
      stack.pop_back();
      auto& top = stack.back();
      top.end = merged_end;
      top.level = block_m_estimate(slice(sample, top.start, top.end), f, sigma);
    }
  }
  return assemble_fit(sample, std::move(stack), f,
                      ScaleEstimate{sigma, ScaleMethod::fixed(sigma), 0});
}

std::vector<double> minmax_levels(const DesignSample& sample, const ScoreFamily& f, double sigma,
                                  OracleOrder order) {
  check_sigma(sigma);
  const auto groups = tie_groups(sample.t());
  const std::size_t g = groups.size();
  // est[u * g + v]: estimate over groups u..v.
  std::vector<double> est(g * g, 0.0);
  for (std::size_t u = 0; u < g; ++u) {
    for (std::size_t v = u; v < g; ++v) {
      est[u * g + v] = block_m_estimate(slice(sample, groups[u].first, groups[v].second), f, sigma);
    }
  }
  std::vector<double> levels(sample.size());
  for (std::size_t i = 0; i < g; ++i) {
    double value;
    if (order == OracleOrder::MaxMin) {
      value = -std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u <= i; ++u) {
        double inner = std::numeric_limits<double>::infinity();
        for (std::size_t v = i; v < g; ++v) inner = std::min(inner, est[u * g + v]);
        value = std::max(value, inner);
      }
    } else {
      value = std::numeric_limits<double>::infinity();
      for (std::size_t v = i; v < g; ++v) {
        double inner = -std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u <= i; ++u) inner = std::max(inner, est[u * g + v]);
        value = std::min(value, inner);
      }
    }
    for (std::size_t j = groups[i].first; j <= groups[i].second; ++j) levels[j] = value;
  }
  return levels;
}

IsotonicFit fit_minmax_oracle(const DesignSample& sample, const ScoreFamily& f, double sigma) {
  const auto levels = minmax_levels(sample, f, sigma, OracleOrder::MaxMin);
  std::vector<Block> blocks;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (!blocks.empty() && blocks.back().level == levels[j]) {
      blocks.back().end = j;
    } else {
      blocks.push_back({j, j, levels[j]});
    }
  }
  return assemble_fit(sample, std::move(blocks), f, ScaleEstimate{sigma, ScaleMethod::fixed(sigma), 0});
}

IsotonicFit fit(const DesignSample& sample, const ScoreFamily& f, const ScaleMethod& method) {
  auto scale = estimate_scale(sample, method);
  auto result = fit_pava(sample, f, scale.value);
  result.scale = std::move(scale);
  return result;
}

double predict(const IsotonicFit& fit, const DesignSample& sample, double t) {
  const auto ts = sample.t();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin()) return fit.fitted.front();
  return fit.fitted[static_cast<std::size_t>(it - ts.begin()) - 1];
}

}  // namespace isoreg
