#pragma once

// Robust estimates of the error scale used to standardize residuals.
//
//   fixed:S        a known scale S
//   diffm          (1/sqrt 2) * bisquare M-scale of successive differences
//                  x[j+1] - x[j] taken in t order (c = 0.7094, b = 3/4)
//   madl1          median |residual| of the exact L1 isotonic fit divided
//                  by the normal quartile 0.6744897501960817. Its
//                  root-n consistency is conjectured, not proven.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isoreg/sample.hpp"

namespace isoreg {

inline constexpr double kBisquareC = 0.7094;
inline constexpr double kBisquareB = 0.75;
/// Phi^{-1}(3/4).
inline constexpr double kNormalQuartile = 0.6744897501960817;

enum class ScaleKind { Fixed, DiffMScale, MadnL1Residuals };

class ScaleMethod {
 public:
  static ScaleMethod fixed(double sigma0);
  static ScaleMethod diff_m_scale(double c = kBisquareC, double b = kBisquareB);
  static ScaleMethod madn_l1_residuals();

  /// Parses `fixed:2.5`, `diffm`, `diffm:c=0.7094,b=0.75`, `madl1`.
  /// `c`/`b` override the DiffMScale constants when given.
  static ScaleMethod parse(std::string_view text, std::optional<double> c = std::nullopt,
                           std::optional<double> b = std::nullopt);

  ScaleKind kind() const { return kind_; }
  double sigma0() const { return sigma0_; }
  double c() const { return c_; }
  double b() const { return b_; }
  std::string name() const;

  friend bool operator==(const ScaleMethod&, const ScaleMethod&) = default;

 private:
  ScaleMethod(ScaleKind kind, double sigma0, double c, double b)
      : kind_(kind), sigma0_(sigma0), c_(c), b_(b) {}

  ScaleKind kind_;
  double sigma0_;
  double c_;
  double b_;
};

struct ScaleEstimate {
  double value;
  ScaleMethod method;
  std::size_t n_used;
};

/// Bisquare rho for scale: 1 - (1 - (u/c)^2)^3 on |u| <= c, 1 beyond.
double bisquare_chi(double u, double c);

/// (1/n) sum chi(u_i / s).
double m_scale_objective(std::span<const double> values, double s, double c);

/// The s > 0 solving m_scale_objective(values, s, c) == b. Throws
/// DegenerateSample when the nonzero fraction of `values` does not exceed b.
double m_scale(std::span<const double> values, double c, double b);

/// Average of the two central order statistics for an even count.
double median(std::vector<double> values);

/// Number of inputs a method consumes for a sample of size n.
std::size_t scale_inputs_used(const ScaleMethod& method, std::size_t n);

ScaleEstimate estimate_scale(const DesignSample& sample, const ScaleMethod& method);

}  // namespace isoreg
