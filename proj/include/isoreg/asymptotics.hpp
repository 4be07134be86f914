#pragma once

// Asymptotic distribution of isotonic M-estimators at an interior point t0:
//
//   n^{1/3} (mu_hat(t0) - mu(t0)) / kappa^{1/3}  ->  slogcm(W(v) + v^2)
//   kappa = 1/2 mu'(t0) H'(t0) sigma0^2 E psi^2(u/sigma0) / [E psi'(u/sigma0)]^2
//
// where slogcm is the slope at zero of the greatest convex minorant of
// two-sided Brownian motion with parabolic drift. Its variance is about 1.04
// and can be re-estimated here with `simulate_chernoff`.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isoreg/psi.hpp"

namespace isoreg {

enum class ErrorKind { Normal, StudentT, Tabulated, PointMass };

/// Symmetric error distribution G with density g (g(0) > 0).
class ErrorModel {
 public:
  static ErrorModel normal(double sigma = 1.0);
  static ErrorModel student_t(double df);
  /// Symmetric piecewise-linear density through (abscissae[i], density[i])
  /// for abscissae 0 = a_0 < a_1 < ... , zero beyond the last point and
  /// mirrored to negative u. Rescaled to integrate to one.
  static ErrorModel tabulated(std::vector<double> abscissae, std::vector<double> density);
  /// Zero noise; only usable for draws.
  static ErrorModel point_mass();

  /// `normal`, `normal:sigma=2`, `t3`, `student:df=3`, `none`.
  static ErrorModel parse(std::string_view text);

  ErrorKind kind() const { return kind_; }
  std::string name() const;
  bool has_density() const { return kind_ != ErrorKind::PointMass; }

  double density(double u) const;
  double cdf(double u) const;
  /// Infinite for Student t with df <= 2.
  double variance() const;
  /// Upper end of the support (infinite unless tabulated).
  double support_bound() const;
  /// Nonnegative points where the density is not smooth.
  std::span<const double> kinks() const { return grid_; }

  void draw(std::mt19937_64& rng, std::span<double> out) const;

 private:
  ErrorModel(ErrorKind kind, double param) : kind_(kind), param_(param) {}

  ErrorKind kind_;
  double param_;                 // sigma or df
  std::vector<double> grid_;     // tabulated abscissae
  std::vector<double> values_;   // tabulated density
  std::vector<double> cumulative_;  // mass of [0, grid_[i]]
};

/// E_G psi^2(u / sigma0) by adaptive quadrature.
double expected_score_square(const ScoreFamily& f, const ErrorModel& model, double sigma0);
/// E_G psi'(u / sigma0). For exact L1 this is the limit 2 sigma0 g(0).
double expected_score_slope(const ScoreFamily& f, const ErrorModel& model, double sigma0);

/// E psi^2 / (E psi')^2. Throws NonIdentifiable when E psi' <= 1e-12.
double efficiency_ratio(const ScoreFamily& f, const ErrorModel& model, double sigma0);

inline constexpr double kChernoffVariance = 1.04;

struct AvarReport {
  double ratio;
  double kappa;
  double avar;
  double var_chernoff;
};

AvarReport avar(const ScoreFamily& f, const ErrorModel& model, double mu_prime_t0, double h_t0,
                double sigma0 = 1.0, double var_chernoff = kChernoffVariance);

struct Point {
  double v;
  double z;
};

/// Greatest convex minorant of a point set, as its vertex list.
class ConvexMinorant {
 public:
  explicit ConvexMinorant(std::vector<Point> vertices) : vertices_(std::move(vertices)) {}

  std::span<const Point> vertices() const { return vertices_; }
  /// Slope of the segment whose interval contains v; the left segment when
  /// v is a vertex. Outside the hull's range the end segment is used.
  double slope_at(double v) const;
  double value_at(double v) const;

 private:
  std::size_t segment_at(double v) const;

  std::vector<Point> vertices_;
};

/// Lower convex hull of points with strictly increasing v (at least two).
ConvexMinorant gcm(std::span<const Point> points);

struct ChernoffConfig {
  double half_width = 3.0;
  double step = 0.005;
  std::size_t replications = 50000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  /// Debug mode: W == 0, so every replicate sees the bare parabola.
  bool zero_noise = false;
};

struct ChernoffSummary {
  double mean;
  double variance;
  double stderr_mean;
  double stderr_variance;
};

struct ChernoffSample {
  std::vector<double> slopes;
  ChernoffConfig config;

  ChernoffSummary summary() const;
};

/// Replicate r draws the right half of W from stream (seed, r, 0) and the
/// left half from (seed, r, 1), outward from v = 0, so a wider half-width
/// extends the same paths.
ChernoffSample simulate_chernoff(const ChernoffConfig& config);

}  // namespace isoreg
