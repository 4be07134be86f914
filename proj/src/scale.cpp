#include "isoreg/scale.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "isoreg/error.hpp"
#include "isoreg/psi.hpp"
#include "isoreg/solver.hpp"

namespace isoreg {
namespace {

constexpr int kMaxBisection = 200;
constexpr double kRelTol = 1e-12;

double parse_value(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("invalid number '" + std::string(text) + "' in scale method");
  }
  return v;
}

}  // namespace

ScaleMethod ScaleMethod::fixed(double sigma0) {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ConfigError("fixed scale must be positive");
  return {ScaleKind::Fixed, sigma0, 0.0, 0.0};
}

ScaleMethod ScaleMethod::diff_m_scale(double c, double b) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("M-scale constant c must be positive");
  if (!(b > 0.0 && b < 1.0)) throw ConfigError("M-scale constant b must lie in (0, 1)");
  return {ScaleKind::DiffMScale, 0.0, c, b};
}

ScaleMethod ScaleMethod::madn_l1_residuals() { return {ScaleKind::MadnL1Residuals, 0.0, 0.0, 0.0}; }

ScaleMethod ScaleMethod::parse(std::string_view text, std::optional<double> c, std::optional<double> b) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "fixed") {
    if (rest.empty()) throw ParseError("fixed scale needs a value, e.g. fixed:2.5");
    return fixed(parse_value(rest));
  }
  if (head == "madl1") {
    if (!rest.empty()) throw ParseError("madl1 takes no parameters");
    return madn_l1_residuals();
  }
  if (head == "diffm") {
    double cv = kBisquareC;
    double bv = kBisquareB;
    auto params = rest;
    while (!params.empty()) {
      const auto comma = params.find(',');
      const auto item = params.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key=value in scale method");
      const auto key = item.substr(0, eq);
      const double v = parse_value(item.substr(eq + 1));
      if (key == "c") {
        cv = v;
      } else if (key == "b") {
        bv = v;
      } else {
        throw ParseError("unknown diffm parameter '" + std::string(key) + "'");
      }
      if (comma == std::string_view::npos) break;
      params.remove_prefix(comma + 1);
    }
    return diff_m_scale(c.value_or(cv), b.value_or(bv));
  }
  throw ParseError("unknown scale method '" + std::string(text) + "'");
}

std::string ScaleMethod::name() const {
  switch (kind_) {
    case ScaleKind::Fixed: return "fixed:" + format_number(sigma0_);
    case ScaleKind::DiffMScale: return "diffm:c=" + format_number(c_) + ",b=" + format_number(b_);
    case ScaleKind::MadnL1Residuals: return "madl1";
  }
  return {};
}

double bisquare_chi(double u, double c) {
  const double r = u / c;
  if (std::fabs(r) > 1.0) return 1.0;
  const double w = 1.0 - r * r;
  return 1.0 - w * w * w;
}

double m_scale_objective(std::span<const double> values, double s, double c) {
  double total = 0.0;
  for (double u : values) total += bisquare_chi(u / s, c);
  return total / static_cast<double>(values.size());
}

double m_scale(std::span<const double> values, double c, double b) {
  if (values.empty()) throw DegenerateSample("M-scale of an empty sample");
  if (!(c > 0.0)) throw DomainError("M-scale constant c must be positive");
  if (!(b > 0.0 && b < 1.0)) throw DomainError("M-scale constant b must lie in (0, 1)");
  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  std::size_t nonzero = 0;
  for (double u : values) {
    const double a = std::fabs(u);
    if (a > 0.0) {
      ++nonzero;
      max_abs = std::max(max_abs, a);
      min_abs = std::min(min_abs, a);
    }
  }
  const double frac = static_cast<double>(nonzero) / static_cast<double>(values.size());
  if (nonzero == 0 || !(frac > b)) {
    throw DegenerateSample("M-scale equation has no root: " + std::to_string(nonzero) + " of " +
                           std::to_string(values.size()) + " values are nonzero, need a fraction above " +
                           format_number(b));
  }
  // objective(lo) > b >= objective(hi); the objective is nonincreasing in s.
  // Below min|u|/c every nonzero value saturates chi, so objective(lo) = frac.
  double lo = std::min(1e-12 * max_abs, 0.5 * min_abs / c);
  double hi = 1e12 * max_abs;
  for (int it = 0; it < kMaxBisection && hi - lo > kRelTol * lo; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (m_scale_objective(values, mid, c) > b) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyBlock("median of an empty sequence");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

std::size_t scale_inputs_used(const ScaleMethod& method, std::size_t n) {
  switch (method.kind()) {
    case ScaleKind::Fixed: return 0;
    case ScaleKind::DiffMScale: return n == 0 ? 0 : n - 1;
    case ScaleKind::MadnL1Residuals: return n;
  }
  return 0;
}

ScaleEstimate estimate_scale(const DesignSample& sample, const ScaleMethod& method) {
  const std::size_t n = sample.size();
  switch (method.kind()) {
    case ScaleKind::Fixed: return {method.sigma0(), method, 0};
    case ScaleKind::DiffMScale: {
      if (n < 2) throw InsufficientData("difference-based scale needs at least two observations");
      std::vector<double> diffs(n - 1);
      const auto x = sample.x();
      for (std::size_t j = 0; j + 1 < n; ++j) diffs[j] = x[j + 1] - x[j];
      const double s = m_scale(diffs, method.c(), method.b());
      return {s / std::sqrt(2.0), method, n - 1};
    }
    case ScaleKind::MadnL1Residuals: {
      const auto l1 = fit_pava(sample, ScoreFamily::l1(), 1.0);
      std::vector<double> abs_res(n);
      std::transform(l1.residuals.begin(), l1.residuals.end(), abs_res.begin(),
                     [](double r) { return std::fabs(r); });
      const double s = median(std::move(abs_res)) / kNormalQuartile;
      if (!(s > 0.0)) throw DegenerateSample("median absolute L1 residual is zero");
      return {s, method, n};
    }
  }
  throw ConfigError("unknown scale method");
}

}  // namespace isoreg
