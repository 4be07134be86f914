#pragma once

// Robustness diagnostics for isotonic M-estimators at a point t0.
//
// `influence` is the squared-bias influence function
//   lim_{eps->0} (T(Lambda_eps) - T(Lambda_0))^2 / eps,
// which is finite because the bias of an isotonic M-estimator under point
// contamination at t0 is of order eps^{1/2}.
//
// `breakdown_lower_bound` is min{H/(1+H), (1-H)/(2-H)} at H = H(t0),
// optionally capped by the breakdown point of a plug-in scale functional.
// The capped form (0.5 for the difference-based bisquare M-scale) is
// conjectural; no proof is known.

#include <cstddef>
#include <optional>

#include "isoreg/asymptotics.hpp"
#include "isoreg/psi.hpp"
#include "isoreg/sample.hpp"
#include "isoreg/scale.hpp"

namespace isoreg {

struct InfluenceInputs {
  double t_star;
  double x_star;
  double t0;
  double mu_t0;
  double mu_prime_t0;
  double h_t0;
  double sigma0;
};

/// 2 mu'(t0) sigma0 |psi((x* - mu(t0))/sigma0)| / (h(t0) E psi'(u/sigma0))
/// when t* == t0, and 0 otherwise.
double influence(const ScoreFamily& f, const InfluenceInputs& in, const ErrorModel& model);

double breakdown_lower_bound(double h_t0, std::optional<double> scale_breakdown = std::nullopt);

/// Replaces the `outlier_count` responses whose t is nearest `t_star` (ties
/// broken by position) with `x_star`.
struct ContaminationSpec {
  double t_star;
  double x_star;
  std::size_t outlier_count;
};

/// Rounded count of outliers for a contamination fraction.
std::size_t outliers_for_fraction(double epsilon, std::size_t n);

DesignSample contaminate(const DesignSample& sample, const ContaminationSpec& spec);

struct ProbeResult {
  double clean;
  double contaminated;
  double deviation;
};

ProbeResult contamination_probe(const DesignSample& sample, const ScoreFamily& f, const ScaleMethod& method,
                                const ContaminationSpec& spec, double t0);

}  // namespace isoreg
