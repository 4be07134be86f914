#include "isoreg/psi.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "isoreg/error.hpp"

namespace isoreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit-interval blend q with q(0)=0, q'(0)=1, q''(0)=0, q(1)=1, q'(1)=0,
// q''(1)=0. q'(s) = (1-s)^2 (15 s^2 + 2 s + 1) >= 0.
double blend(double s) { return s * (1.0 + s * s * (4.0 + s * (-7.0 + 3.0 * s))); }
double blend_slope(double s) {
  const double r = 1.0 - s;
  return r * r * (15.0 * s * s + 2.0 * s + 1.0);
}
// Integral of the blend over [0, s].
double blend_area(double s) {
  const double s2 = s * s;
  return s2 * (0.5 + s2 * (1.0 + s * (-1.4 + 0.5 * s)));
}

double sign_of(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

struct Sl1Zones {
  double inner;  // end of the linear zone
  double outer;  // start of saturation
};

Sl1Zones sl1_zones(double m) { return {1.0 / m - 1.0 / (m * m), 1.0 / m}; }

double sl1_psi(double u, double m) {
  if (std::isinf(m)) return sign_of(u);
  const double a = std::fabs(u);
  const auto z = sl1_zones(m);
  double v;
  if (a <= z.inner) {
    v = m * a;
  } else if (a >= z.outer) {
    v = 1.0;
  } else {
    v = (1.0 - 1.0 / m) + blend((a - z.inner) * m * m) / m;
  }
  return u < 0.0 ? -v : v;
}

double sl1_psi_prime(double u, double m) {
  if (std::isinf(m)) return 0.0;
  const double a = std::fabs(u);
  const auto z = sl1_zones(m);
  if (a <= z.inner) return m;
  if (a >= z.outer) return 0.0;
  return m * blend_slope((a - z.inner) * m * m);
}

double sl1_rho(double u, double m) {
  const double a = std::fabs(u);
  if (std::isinf(m)) return a;
  const auto z = sl1_zones(m);
  const double at_inner = 0.5 * m * z.inner * z.inner;
  if (a <= z.inner) return 0.5 * m * a * a;
  const double m3 = m * m * m;
  if (a >= z.outer) {
    const double at_outer = at_inner + (1.0 - 1.0 / m) / (m * m) + blend_area(1.0) / m3;
    return at_outer + (a - z.outer);
  }
  return at_inner + (1.0 - 1.0 / m) * (a - z.inner) + blend_area((a - z.inner) * m * m) / m3;
}

double parse_double(std::string_view text, std::string_view what) {
  if (text == "inf" || text == "+inf" || text == "infinity") return kInf;
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("invalid number '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

std::map<std::string, double> parse_params(std::string_view text, std::string_view family) {
  std::map<std::string, double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key=value in family '" + std::string(family) + "'");
    }
    std::string key(item.substr(0, eq));
    out[key] = parse_double(item.substr(eq + 1), key);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void check_k(double k) {
  if (!(k > 0.0) || std::isinf(k)) throw ConfigError("Huber constant k must be positive and finite");
}
void check_m(double m, bool allow_inf) {
  if (!(m > 1.0) || (!allow_inf && std::isinf(m))) {
    throw ConfigError(allow_inf ? "smoothing constant m must exceed 1"
                                : "smoothing constant m must exceed 1 and be finite");
  }
}

}  // namespace

ScoreFamily ScoreFamily::l2() { return {FamilyKind::L2, 0.0, 0.0}; }

ScoreFamily ScoreFamily::huber(double k) {
  check_k(k);
  return {FamilyKind::Huber, k, 0.0};
}

ScoreFamily ScoreFamily::smoothed_l1(double m) {
  check_m(m, true);
  return {FamilyKind::SmoothedL1, 0.0, m};
}

ScoreFamily ScoreFamily::l1() { return smoothed_l1(kInf); }

ScoreFamily ScoreFamily::smoothed_huber(double k, double m) {
  check_k(k);
  check_m(m, false);
  return {FamilyKind::SmoothedHuber, k, m};
}

ScoreFamily ScoreFamily::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto params = colon == std::string_view::npos
                          ? std::map<std::string, double>{}
                          : parse_params(text.substr(colon + 1), text);
  auto need = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) {
      throw ParseError("family '" + std::string(text) + "' needs parameter " + key);
    }
    return it->second;
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : params) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw ParseError("unknown parameter '" + key + "' in family '" + std::string(text) + "'");
    }
  };
  if (head == "l2") {
    only({});
    return l2();
  }
  if (head == "l1") {
    only({});
    return l1();
  }
  if (head == "huber") {
    only({"k"});
    return huber(need("k"));
  }
  if (head == "sl1") {
    only({"m"});
    return smoothed_l1(need("m"));
  }
  if (head == "shuber") {
    only({"k", "m"});
    return smoothed_huber(need("k"), need("m"));
  }
  throw ParseError("unknown score family '" + std::string(text) + "'");
}

bool ScoreFamily::is_exact_l1() const { return kind_ == FamilyKind::SmoothedL1 && std::isinf(m_); }

double ScoreFamily::sup_psi() const {
  switch (kind_) {
    case FamilyKind::L2: return kInf;
    case FamilyKind::Huber:
    case FamilyKind::SmoothedHuber: return k_;
    case FamilyKind::SmoothedL1: return 1.0;
  }
  return kInf;
}

std::vector<double> ScoreFamily::breakpoints() const {
  switch (kind_) {
    case FamilyKind::L2: return {};
    case FamilyKind::Huber: return {k_};
    case FamilyKind::SmoothedL1: {
      if (std::isinf(m_)) return {0.0};
      const auto z = sl1_zones(m_);
      return {z.inner, z.outer};
    }
    case FamilyKind::SmoothedHuber: return {k_ * (1.0 - 1.0 / m_), k_};
  }
  return {};
}

std::string ScoreFamily::name() const {
  switch (kind_) {
    case FamilyKind::L2: return "l2";
    case FamilyKind::Huber: return "huber:k=" + format_number(k_);
    case FamilyKind::SmoothedL1: return std::isinf(m_) ? "l1" : "sl1:m=" + format_number(m_);
    case FamilyKind::SmoothedHuber:
      return "shuber:k=" + format_number(k_) + ",m=" + format_number(m_);
  }
  return {};
}

double rho(const ScoreFamily& f, double u) {
  switch (f.kind()) {
    case FamilyKind::L2: return u * u;
    case FamilyKind::Huber: {
      const double a = std::fabs(u);
      return a <= f.k() ? 0.5 * a * a : f.k() * a - 0.5 * f.k() * f.k();
    }
    case FamilyKind::SmoothedL1: return sl1_rho(u, f.m());
    case FamilyKind::SmoothedHuber: {
      const double width = f.k() * f.m();
      return f.k() * width * sl1_rho(u / width, f.m());
    }
  }
  return 0.0;
}

double psi(const ScoreFamily& f, double u) {
  switch (f.kind()) {
    case FamilyKind::L2: return 2.0 * u;
    case FamilyKind::Huber: {
      const double a = std::fmin(std::fabs(u), f.k());
      return u < 0.0 ? -a : a;
    }
    case FamilyKind::SmoothedL1: return sl1_psi(u, f.m());
    case FamilyKind::SmoothedHuber: return f.k() * sl1_psi(u / (f.k() * f.m()), f.m());
  }
  return 0.0;
}

double psi_prime(const ScoreFamily& f, double u) {
  switch (f.kind()) {
    case FamilyKind::L2: return 2.0;
    case FamilyKind::Huber: return std::fabs(u) < f.k() ? 1.0 : 0.0;
    case FamilyKind::SmoothedL1: return sl1_psi_prime(u, f.m());
    case FamilyKind::SmoothedHuber: return sl1_psi_prime(u / (f.k() * f.m()), f.m()) / f.m();
  }
  return 0.0;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace isoreg
