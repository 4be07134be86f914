#include <doctest.h>

#include <cmath>
#include <random>

#include "isoreg/error.hpp"
#include "isoreg/scale.hpp"
#include "support.hpp"

using namespace isoreg;

namespace {

double chi_oracle(double u, double c) {
  const double r = u / c;
  return std::fabs(r) >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - r * r, 3);
}

// Solves mean chi(v/s) = b by bisection on log s.
double m_scale_oracle(const std::vector<double>& v, double c, double b) {
  auto g = [&](double log_s) {
    double total = 0.0;
    for (double u : v) total += chi_oracle(u / std::exp(log_s), c);
    return total / static_cast<double>(v.size()) - b;
  };
  return std::exp(isoreg::testing::bisect_decreasing(g, -60.0, 60.0, 300));
}

}  // namespace

TEST_CASE("bisquare chi") {
  CHECK(bisquare_chi(0.0, kBisquareC) == 0.0);
  CHECK(bisquare_chi(kBisquareC, kBisquareC) == 1.0);
  CHECK(bisquare_chi(-5.0, kBisquareC) == 1.0);
  CHECK(bisquare_chi(0.35, 0.7) == doctest::Approx(1.0 - std::pow(0.75, 3)));
}

TEST_CASE("M-scale matches a direct bisection") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(5 + trial);
    for (auto& u : v) u = 3.0 * z(rng);
    const double s = m_scale(v, kBisquareC, kBisquareB);
    CHECK(s == doctest::Approx(m_scale_oracle(v, kBisquareC, kBisquareB)).epsilon(1e-9));
    CHECK(m_scale_objective(v, s, kBisquareC) == doctest::Approx(kBisquareB).epsilon(1e-6));
  }
}

TEST_CASE("M-scale equivariance and degenerate input") {
  const std::vector<double> v{0.3, -1.2, 2.5, 0.8, -0.1, 1.9, -2.2};
  const double s = m_scale(v, kBisquareC, kBisquareB);
  std::vector<double> w = v;
  for (auto& u : w) u *= -4.0;
  CHECK(m_scale(w, kBisquareC, kBisquareB) == doctest::Approx(4.0 * s).epsilon(1e-11));

  CHECK_THROWS_AS(m_scale(std::vector<double>(6, 0.0), kBisquareC, kBisquareB), DegenerateSample);
  // 3 nonzero of 4 is exactly b, which is not enough.
  CHECK_THROWS_AS(m_scale(std::vector<double>{1.0, 2.0, 3.0, 0.0}, kBisquareC, kBisquareB), DegenerateSample);
  CHECK_NOTHROW(m_scale(std::vector<double>{1.0, 2.0, 3.0, 4.0, 0.0}, kBisquareC, kBisquareB));
  CHECK_THROWS_AS(m_scale(std::vector<double>{}, kBisquareC, kBisquareB), DegenerateSample);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), EmptyBlock);
}

TEST_CASE("difference scale of Gaussian noise") {
  std::mt19937_64 rng(22);
  const auto sample = isoreg::testing::random_trend_sample(rng, 20000, 1.0);
  const auto est = estimate_scale(sample, ScaleMethod::diff_m_scale());
  CHECK(est.n_used == 19999);
  // Population value of the bisquare M-scale with these constants is 0.997.
  CHECK(est.value == doctest::Approx(0.997).epsilon(0.03));
  const auto mad = estimate_scale(sample, ScaleMethod::madn_l1_residuals());
  CHECK(mad.n_used == 20000);
  CHECK(mad.value == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("difference scale follows the sorted order") {
  const DesignSample a({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, {1.0, 3.5, 2.0, 6.0, 4.0, 8.5});
  const DesignSample b({0.6, 0.3, 0.5, 0.1, 0.2, 0.4}, {8.5, 2.0, 4.0, 1.0, 3.5, 6.0});
  CHECK(estimate_scale(a, ScaleMethod::diff_m_scale()).value ==
        estimate_scale(b, ScaleMethod::diff_m_scale()).value);
  std::vector<double> d{2.5, -1.5, 4.0, -2.0, 4.5};
  CHECK(estimate_scale(a, ScaleMethod::diff_m_scale()).value ==
        doctest::Approx(m_scale_oracle(d, kBisquareC, kBisquareB) / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("scale method errors") {
  CHECK_THROWS_AS(estimate_scale(DesignSample({0.5}, {1.0}), ScaleMethod::diff_m_scale()), InsufficientData);
  CHECK_THROWS_AS(estimate_scale(DesignSample({0.1, 0.2, 0.3, 0.4}, {1.0, 1.0, 1.0, 1.0}),
                                 ScaleMethod::diff_m_scale()),
                  DegenerateSample);
  CHECK_THROWS_AS(estimate_scale(DesignSample({0.1, 0.2, 0.3}, {1.0, 2.0, 3.0}), ScaleMethod::madn_l1_residuals()),
                  DegenerateSample);
  CHECK(estimate_scale(DesignSample({0.1}, {1.0}), ScaleMethod::fixed(2.5)).value == 2.5);
  CHECK(scale_inputs_used(ScaleMethod::fixed(1.0), 10) == 0);
  CHECK(scale_inputs_used(ScaleMethod::diff_m_scale(), 10) == 9);
  CHECK(scale_inputs_used(ScaleMethod::madn_l1_residuals(), 10) == 10);
}

TEST_CASE("scale method parsing") {
  CHECK(ScaleMethod::parse("fixed:2.5") == ScaleMethod::fixed(2.5));
  CHECK(ScaleMethod::parse("diffm") == ScaleMethod::diff_m_scale());
  CHECK(ScaleMethod::parse("diffm:c=1.5,b=0.5") == ScaleMethod::diff_m_scale(1.5, 0.5));
  CHECK(ScaleMethod::parse("diffm", 1.0) == ScaleMethod::diff_m_scale(1.0, kBisquareB));
  CHECK(ScaleMethod::parse("madl1") == ScaleMethod::madn_l1_residuals());
  for (const auto& m : {ScaleMethod::fixed(0.125), ScaleMethod::diff_m_scale(), ScaleMethod::madn_l1_residuals()}) {
    CHECK(ScaleMethod::parse(m.name()) == m);
  }
  CHECK_THROWS_AS(ScaleMethod::parse("fixed"), ParseError);
  CHECK_THROWS_AS(ScaleMethod::parse("mad"), ParseError);
  CHECK_THROWS_AS(ScaleMethod::parse("diffm:q=1"), ParseError);
  CHECK_THROWS_AS(ScaleMethod::parse("fixed:-1"), ConfigError);
  CHECK_THROWS_AS(ScaleMethod::parse("diffm:b=1.5"), ConfigError);
}
