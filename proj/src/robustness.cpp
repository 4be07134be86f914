#include "isoreg/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isoreg/error.hpp"
#include "isoreg/solver.hpp"

namespace isoreg {

double influence(const ScoreFamily& f, const InfluenceInputs& in, const ErrorModel& model) {
  if (!(in.h_t0 > 0.0)) throw DomainError("design density h(t0) must be positive");
  if (!(in.mu_prime_t0 > 0.0)) throw DomainError("mu'(t0) must be positive");
  if (!(in.sigma0 > 0.0)) throw DomainError("sigma0 must be positive");
  const double slope = expected_score_slope(f, model, in.sigma0);
  if (!(slope > 1e-12)) throw NonIdentifiable("E psi' vanishes under " + model.name() + " for " + f.name());
  if (in.t_star != in.t0) return 0.0;
  const double score = std::fabs(psi(f, (in.x_star - in.mu_t0) / in.sigma0));
  return 2.0 * in.mu_prime_t0 * in.sigma0 * score / (in.h_t0 * slope);
}

double breakdown_lower_bound(double h_t0, std::optional<double> scale_breakdown) {
  if (!(h_t0 > 0.0 && h_t0 < 1.0)) throw DomainError("H(t0) must lie in (0, 1)");
  double bound = std::min(h_t0 / (1.0 + h_t0), (1.0 - h_t0) / (2.0 - h_t0));
  if (scale_breakdown) {
    if (!(*scale_breakdown >= 0.0 && *scale_breakdown <= 1.0)) {
      throw DomainError("scale breakdown point must lie in [0, 1]");
    }
    bound = std::min(bound, *scale_breakdown);
  }
  return bound;
}

std::size_t outliers_for_fraction(double epsilon, std::size_t n) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("contamination fraction must lie in [0, 1)");
  return static_cast<std::size_t>(std::llround(epsilon * static_cast<double>(n)));
}

DesignSample contaminate(const DesignSample& sample, const ContaminationSpec& spec) {
  const std::size_t n = sample.size();
  if (spec.outlier_count >= n) throw DomainError("outlier count must be below the sample size");
  if (!std::isfinite(spec.x_star) || !std::isfinite(spec.t_star)) throw DomainError("contamination point must be finite");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(sample.t(a) - spec.t_star) < std::fabs(sample.t(b) - spec.t_star);
  });
  std::vector<double> x(sample.x().begin(), sample.x().end());
  for (std::size_t i = 0; i < spec.outlier_count; ++i) x[order[i]] = spec.x_star;
  return sample.with_responses(std::move(x));
}

ProbeResult contamination_probe(const DesignSample& sample, const ScoreFamily& f, const ScaleMethod& method,
                                const ContaminationSpec& spec, double t0) {
  const auto dirty = contaminate(sample, spec);
  const double clean = predict(fit(sample, f, method), sample, t0);
  const double contaminated = predict(fit(dirty, f, method), dirty, t0);
  return {clean, contaminated, std::fabs(contaminated - clean)};
}

}  // namespace isoreg
