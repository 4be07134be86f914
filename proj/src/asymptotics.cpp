#include "isoreg/asymptotics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isoreg/error.hpp"
#include "isoreg/parallel.hpp"
#include "isoreg/rng.hpp"

namespace isoreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  if (std::isinf(b)) return Rule::integrate(f, a, b, 25, 1e-12, &error);
  // Mapped to [0, 1]: the rule's error estimate misbehaves on very short
  // intervals and would otherwise refine to full depth.
  const double width = b - a;
  return width * Rule::integrate([&](double s) { return f(a + width * s); }, 0.0, 1.0, 25, 1e-12, &error);
}

// 2 * int_0^inf even(u) g(u) du, split at every nonsmooth point of the
// integrand so each piece is smooth.
template <class F>
double symmetric_expectation(const ErrorModel& model, std::vector<double> cuts, F even) {
  const double bound = model.support_bound();
  cuts.insert(cuts.end(), model.kinks().begin(), model.kinks().end());
  cuts.push_back(0.0);
  std::erase_if(cuts, [&](double c) { return !(c >= 0.0) || c >= bound; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(bound);
  auto integrand = [&](double u) { return even(u) * model.density(u); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) total += integrate(integrand, cuts[i], cuts[i + 1]);
  }
  return 2.0 * total;
}

std::vector<double> scaled_breakpoints(const ScoreFamily& f, double sigma0) {
  auto cuts = f.breakpoints();
  for (auto& c : cuts) c *= sigma0;
  return cuts;
}

void check_density(const ErrorModel& model) {
  if (!model.has_density()) throw DomainError("error model '" + model.name() + "' has no density");
}

double parse_param(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("invalid number '" + std::string(text) + "' in error model");
  }
  return v;
}

}  // namespace

ErrorModel ErrorModel::normal(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("normal sigma must be positive");
  return {ErrorKind::Normal, sigma};
}

ErrorModel ErrorModel::student_t(double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw ConfigError("Student t degrees of freedom must be positive");
  return {ErrorKind::StudentT, df};
}

ErrorModel ErrorModel::point_mass() { return {ErrorKind::PointMass, 0.0}; }

ErrorModel ErrorModel::tabulated(std::vector<double> abscissae, std::vector<double> density) {
  if (abscissae.size() < 2 || abscissae.size() != density.size()) {
    throw ConfigError("tabulated density needs matching abscissae and values, at least two");
  }
  if (abscissae.front() != 0.0) throw ConfigError("tabulated density must start at u = 0");
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (i > 0 && !(abscissae[i] > abscissae[i - 1])) throw ConfigError("abscissae must increase strictly");
    if (!(density[i] >= 0.0) || !std::isfinite(density[i])) throw ConfigError("density values must be finite and >= 0");
  }
  if (!(density.front() > 0.0)) throw ConfigError("tabulated density must be positive at 0");
  double half = 0.0;
  for (std::size_t i = 0; i + 1 < abscissae.size(); ++i) {
    half += 0.5 * (density[i] + density[i + 1]) * (abscissae[i + 1] - abscissae[i]);
  }
  ErrorModel model{ErrorKind::Tabulated, 0.0};
  for (auto& d : density) d *= 0.5 / half;
  model.cumulative_.assign(abscissae.size(), 0.0);
  for (std::size_t i = 0; i + 1 < abscissae.size(); ++i) {
    model.cumulative_[i + 1] =
        model.cumulative_[i] + 0.5 * (density[i] + density[i + 1]) * (abscissae[i + 1] - abscissae[i]);
  }
  model.grid_ = std::move(abscissae);
  model.values_ = std::move(density);
  return model;
}

ErrorModel ErrorModel::parse(std::string_view text) {
  if (text == "normal") return normal(1.0);
  if (text == "none") return point_mass();
  if (text.starts_with("normal:sigma=")) return normal(parse_param(text.substr(13)));
  if (text.starts_with("student:df=")) return student_t(parse_param(text.substr(11)));
  if (text.size() > 1 && text.front() == 't') return student_t(parse_param(text.substr(1)));
  throw ParseError("unknown error model '" + std::string(text) + "'");
}

std::string ErrorModel::name() const {
  switch (kind_) {
    case ErrorKind::Normal: return param_ == 1.0 ? "normal" : "normal:sigma=" + format_number(param_);
    case ErrorKind::StudentT: return "student:df=" + format_number(param_);
    case ErrorKind::Tabulated: return "tabulated";
    case ErrorKind::PointMass: return "none";
  }
  return {};
}

double ErrorModel::density(double u) const {
  switch (kind_) {
    case ErrorKind::Normal: return boost::math::pdf(boost::math::normal_distribution<double>(0.0, param_), u);
    case ErrorKind::StudentT: return boost::math::pdf(boost::math::students_t_distribution<double>(param_), u);
    case ErrorKind::Tabulated: {
      const double a = std::fabs(u);
      if (a >= grid_.back()) return 0.0;
      const auto it = std::upper_bound(grid_.begin(), grid_.end(), a);
      const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
      const double w = (a - grid_[i]) / (grid_[i + 1] - grid_[i]);
      return values_[i] + w * (values_[i + 1] - values_[i]);
    }
    case ErrorKind::PointMass: break;
  }
  throw DomainError("point-mass error model has no density");
}

double ErrorModel::cdf(double u) const {
  switch (kind_) {
    case ErrorKind::Normal: return boost::math::cdf(boost::math::normal_distribution<double>(0.0, param_), u);
    case ErrorKind::StudentT: return boost::math::cdf(boost::math::students_t_distribution<double>(param_), u);
    case ErrorKind::Tabulated: {
      const double a = std::fabs(u);
      double mass = 0.5;
      if (a < grid_.back()) {
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), a);
        const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
        const double d = a - grid_[i];
        const double slope = (values_[i + 1] - values_[i]) / (grid_[i + 1] - grid_[i]);
        mass = cumulative_[i] + values_[i] * d + 0.5 * slope * d * d;
      }
      return u >= 0.0 ? 0.5 + mass : 0.5 - mass;
    }
    case ErrorKind::PointMass: return u >= 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double ErrorModel::variance() const {
  switch (kind_) {
    case ErrorKind::Normal: return param_ * param_;
    case ErrorKind::StudentT: return param_ > 2.0 ? param_ / (param_ - 2.0) : kInf;
    case ErrorKind::Tabulated: return symmetric_expectation(*this, {}, [](double u) { return u * u; });
    case ErrorKind::PointMass: return 0.0;
  }
  return kInf;
}

double ErrorModel::support_bound() const { return kind_ == ErrorKind::Tabulated ? grid_.back() : kInf; }

void ErrorModel::draw(std::mt19937_64& rng, std::span<double> out) const {
  switch (kind_) {
    case ErrorKind::Normal: {
      std::normal_distribution<double> dist(0.0, param_);
      for (auto& v : out) v = dist(rng);
      return;
    }
    case ErrorKind::StudentT: {
      std::student_t_distribution<double> dist(param_);
      for (auto& v : out) v = dist(rng);
      return;
    }
    case ErrorKind::Tabulated: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (auto& v : out) {
        const double p = unif(rng);
        const double mass = std::fabs(p - 0.5);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), mass);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), grid_.size() - 1) - 1;
        const double r = mass - cumulative_[i];
        const double g = values_[i];
        const double slope = (values_[i + 1] - values_[i]) / (grid_[i + 1] - grid_[i]);
        const double denom = g + std::sqrt(std::max(0.0, g * g + 2.0 * slope * r));
        const double d = denom > 0.0 ? std::min(2.0 * r / denom, grid_[i + 1] - grid_[i]) : 0.0;
        const double a = grid_[i] + d;
        v = p < 0.5 ? -a : a;
      }
      return;
    }
    case ErrorKind::PointMass: std::fill(out.begin(), out.end(), 0.0); return;
  }
}

double expected_score_square(const ScoreFamily& f, const ErrorModel& model, double sigma0) {
  check_density(model);
  if (!(sigma0 > 0.0)) throw DomainError("sigma0 must be positive");
  if (f.kind() == FamilyKind::L2) return 4.0 * model.variance() / (sigma0 * sigma0);
  if (f.is_exact_l1()) return 1.0;
  return symmetric_expectation(model, scaled_breakpoints(f, sigma0), [&](double u) {
    const double p = psi(f, u / sigma0);
    return p * p;
  });
}

double expected_score_slope(const ScoreFamily& f, const ErrorModel& model, double sigma0) {
  check_density(model);
  if (!(sigma0 > 0.0)) throw DomainError("sigma0 must be positive");
  if (f.kind() == FamilyKind::L2) return 2.0;
  // psi = sign: E psi'(u/sigma0) is twice the density of u/sigma0 at zero.
  if (f.is_exact_l1()) return 2.0 * sigma0 * model.density(0.0);
  return symmetric_expectation(model, scaled_breakpoints(f, sigma0),
                               [&](double u) { return psi_prime(f, u / sigma0); });
}

double efficiency_ratio(const ScoreFamily& f, const ErrorModel& model, double sigma0) {
  const double slope = expected_score_slope(f, model, sigma0);
  if (!(slope > 1e-12)) throw NonIdentifiable("E psi' vanishes under " + model.name() + " for " + f.name());
  const double square = expected_score_square(f, model, sigma0);
  if (!std::isfinite(square)) throw DomainError("E psi^2 is infinite for " + f.name() + " under " + model.name());
  return square / (slope * slope);
}

AvarReport avar(const ScoreFamily& f, const ErrorModel& model, double mu_prime_t0, double h_t0, double sigma0,
                double var_chernoff) {
  if (!(mu_prime_t0 > 0.0)) throw DomainError("mu'(t0) must be positive");
  if (!(h_t0 > 0.0)) throw DomainError("design density h(t0) must be positive");
  if (!(var_chernoff > 0.0)) throw DomainError("Chernoff variance must be positive");
  const double ratio = efficiency_ratio(f, model, sigma0);
  const double kappa = 0.5 * mu_prime_t0 * h_t0 * sigma0 * sigma0 * ratio;
  return {ratio, kappa, std::cbrt(kappa * kappa) * var_chernoff, var_chernoff};
}

std::size_t ConvexMinorant::segment_at(double v) const {
  // First vertex at or right of v closes the segment containing v.
  const auto it = std::lower_bound(vertices_.begin() + 1, vertices_.end() - 1, v,
                                   [](const Point& p, double x) { return p.v < x; });
  return static_cast<std::size_t>(it - vertices_.begin());
}

double ConvexMinorant::slope_at(double v) const {
  const std::size_t j = segment_at(v);
  const auto& a = vertices_[j - 1];
  const auto& b = vertices_[j];
  return (b.z - a.z) / (b.v - a.v);
}

double ConvexMinorant::value_at(double v) const {
  const std::size_t j = segment_at(v);
  const auto& a = vertices_[j - 1];
  return a.z + slope_at(v) * (v - a.v);
}

ConvexMinorant gcm(std::span<const Point> points) {
  if (points.size() < 2) throw DomainError("convex minorant needs at least two points");
  std::vector<Point> hull;
  hull.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (i > 0 && !(p.v > points[i - 1].v)) throw DomainError("abscissae must increase strictly");
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // Drop b unless it lies strictly below the chord from a to p.
      if ((b.z - a.z) * (p.v - a.v) >= (p.z - a.z) * (b.v - a.v)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return ConvexMinorant(std::move(hull));
}

ChernoffSummary ChernoffSample::summary() const {
  const auto r = static_cast<double>(slopes.size());
  double sum = 0.0;
  for (double s : slopes) sum += s;
  const double mean = sum / r;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double s : slopes) {
    const double d = (s - mean) * (s - mean);
    m2 += d;
    m4 += d * d;
  }
  if (slopes.size() < 2) return {mean, 0.0, 0.0, 0.0};
  const double variance = m2 / (r - 1.0);
  const double pop2 = m2 / r;
  const double pop4 = m4 / r;
  return {mean, variance, std::sqrt(variance / r), std::sqrt(std::max(0.0, pop4 - pop2 * pop2) / r)};
}

ChernoffSample simulate_chernoff(const ChernoffConfig& config) {
  if (!(config.half_width >= 2.0) || !std::isfinite(config.half_width)) {
    throw ConfigError("half-width must be at least 2");
  }
  if (!(config.step > 0.0 && config.step <= 0.01)) throw ConfigError("grid step must lie in (0, 0.01]");
  if (config.replications < 1) throw ConfigError("need at least one replication");
  const double ratio = config.half_width / config.step;
  const auto half = static_cast<std::size_t>(std::llround(ratio));
  if (std::fabs(static_cast<double>(half) - ratio) > 1e-9 * ratio) {
    throw ConfigError("half-width must be a whole number of grid steps");
  }

  ChernoffSample out{std::vector<double>(config.replications), config};
  const double sd = std::sqrt(config.step);
  parallel_for(config.replications, config.threads, [&](std::size_t r) {
    std::vector<Point> path(2 * half + 1);
    path[half] = {0.0, 0.0};
    for (std::uint32_t lane = 0; lane < 2; ++lane) {
      auto rng = replicate_stream(config.seed, r, lane);
      std::normal_distribution<double> increment(0.0, sd);
      double w = 0.0;
      for (std::size_t i = 1; i <= half; ++i) {
        if (!config.zero_noise) w += increment(rng);
        const double v = static_cast<double>(i) * config.step;
        path[lane == 0 ? half + i : half - i] = {lane == 0 ? v : -v, w + v * v};
      }
    }
    out.slopes[r] = gcm(path).slope_at(0.0);
  });
  return out;
}

}  // namespace isoreg
