#pragma once

// Test-only generators and independent oracles. Nothing here calls the code
// path it is used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "isoreg/psi.hpp"
#include "isoreg/sample.hpp"

namespace isoreg::testing {

inline std::vector<ScoreFamily> all_families() {
  return {ScoreFamily::l2(), ScoreFamily::l1(), ScoreFamily::huber(0.98), ScoreFamily::huber(1.5),
          ScoreFamily::smoothed_l1(50.0), ScoreFamily::smoothed_huber(0.98, 20.0)};
}

/// Small sample with ties in t and frequent order violations; responses
/// drawn on a coarse grid so equal values also occur.
inline DesignSample random_small_sample(std::mt19937_64& rng, std::size_t max_n = 12) {
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  const std::size_t n = size(rng);
  std::uniform_int_distribution<int> tick(0, static_cast<int>(n));
  std::normal_distribution<double> noise(0.0, 1.5);
  std::bernoulli_distribution coarse(0.3);
  std::vector<double> t(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(tick(rng)) / static_cast<double>(n);
    const double v = 0.8 * t[i] + noise(rng);
    x[i] = coarse(rng) ? std::round(2.0 * v) / 2.0 : v;
  }
  return DesignSample(std::move(t), std::move(x));
}

inline DesignSample random_trend_sample(std::mt19937_64& rng, std::size_t n, double noise_sd = 1.0) {
  std::normal_distribution<double> noise(0.0, noise_sd);
  std::vector<double> t(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    x[i] = 10.0 + 5.0 * t[i] * t[i] + noise(rng);
  }
  return DesignSample(std::move(t), std::move(x));
}

/// Composite Simpson rule on [a, b] with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000) {
  const double h = (b - a) / panels;
  double total = f(a) + f(b);
  for (int i = 1; i < panels; ++i) total += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return total * h / 3.0;
}

/// Root of a nonincreasing function on [lo, hi] by plain bisection.
inline double bisect_decreasing(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Classical mean-pooling PAVA over tie groups. Pooled means are recomputed
/// from the raw responses in index order.
inline std::vector<double> mean_pooling_pava(const DesignSample& sample) {
  struct Pool {
    std::size_t start, end;
    double mean;
  };
  auto mean_of = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = a; j <= b; ++j) s += sample.x(j);
    return s / static_cast<double>(b - a + 1);
  };
  std::vector<Pool> pools;
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t j = i;
    while (j + 1 < sample.size() && sample.t(j + 1) == sample.t(i)) ++j;
    pools.push_back({i, j, mean_of(i, j)});
    while (pools.size() > 1 && pools[pools.size() - 2].mean >= pools.back().mean) {
      const auto end = pools.back().end;
      pools.pop_back();
      pools.back().end = end;
      pools.back().mean = mean_of(pools.back().start, end);
    }
    i = j + 1;
  }
  std::vector<double> fitted(sample.size());
  for (const auto& p : pools) {
    for (std::size_t j = p.start; j <= p.end; ++j) fitted[j] = p.mean;
  }
  return fitted;
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double standard_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

/// E psi^2 and E psi' for Huber(k) under N(0,1) in closed form.
inline double huber_normal_square(double k) {
  const double inner = 2.0 * standard_normal_cdf(k) - 1.0;
  return inner - 2.0 * k * standard_normal_pdf(k) + 2.0 * k * k * (1.0 - standard_normal_cdf(k));
}
inline double huber_normal_slope(double k) { return 2.0 * standard_normal_cdf(k) - 1.0; }

}  // namespace isoreg::testing
