#include <doctest.h>

#include <cmath>
#include <random>

#include "isoreg/error.hpp"
#include "isoreg/psi.hpp"
#include "support.hpp"

using namespace isoreg;
using isoreg::testing::all_families;

namespace {

bool near_breakpoint(const ScoreFamily& f, double u, double h) {
  for (double b : f.breakpoints()) {
    if (std::fabs(std::fabs(u) - b) < 4.0 * h) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("rho examples") {
  CHECK(rho(ScoreFamily::l2(), 3.0) == 9.0);
  const auto h = ScoreFamily::huber(0.98);
  CHECK(rho(h, 0.0) == 0.0);
  CHECK(rho(h, 2.0) == doctest::Approx(0.98 * 2.0 - 0.98 * 0.98 / 2.0).epsilon(1e-14));
  // Integrating psi from 0 gives the same value.
  const double area = isoreg::testing::simpson([&](double u) { return psi(h, u); }, 0.0, 0.98, 2000) +
                      isoreg::testing::simpson([&](double u) { return psi(h, u); }, 0.98, 2.0, 2000);
  CHECK(area == doctest::Approx(1.4798).epsilon(1e-10));
  CHECK(rho(h, 2.0) == doctest::Approx(1.4798).epsilon(1e-12));
}

TEST_CASE("psi examples") {
  CHECK(psi(ScoreFamily::huber(0.98), 2.0) == 0.98);
  for (const auto& f : all_families()) CHECK(psi(f, 0.0) == 0.0);
  // 0.005 lies inside the linear zone |u| < 1/100 - 1/100^2 = 0.0099.
  const auto s = ScoreFamily::smoothed_l1(100.0);
  CHECK(s.breakpoints().front() == doctest::Approx(0.0099));
  CHECK(psi(s, 0.005) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("psi_prime examples") {
  const auto h = ScoreFamily::huber(0.98);
  CHECK(psi_prime(h, 0.5) == 1.0);
  CHECK(psi_prime(h, 1.5) == 0.0);
  CHECK(psi_prime(h, 0.98) == 0.0);
  CHECK(psi_prime(ScoreFamily::smoothed_l1(100.0), 0.0) == 100.0);
  CHECK(psi_prime(ScoreFamily::smoothed_l1(100.0), 0.0100001) == 0.0);
}

TEST_CASE("symmetry and monotonicity on random grids") {
  std::mt19937_64 rng(11);
  for (const auto& f : all_families()) {
    CAPTURE(f.name());
    CHECK(rho(f, 0.0) == 0.0);
    const double span = f.kind() == FamilyKind::SmoothedL1 ? 0.05 : 4.0;
    std::uniform_real_distribution<double> unif(-span, span);
    std::vector<double> grid(4000);
    for (auto& u : grid) u = unif(rng);
    std::sort(grid.begin(), grid.end());
    double prev_psi = -INFINITY;
    for (double u : grid) {
      CHECK(psi(f, -u) == -psi(f, u));
      CHECK(rho(f, -u) == rho(f, u));
      CHECK(psi_prime(f, -u) == psi_prime(f, u));
      CHECK(psi_prime(f, u) >= 0.0);
      CHECK(rho(f, u) >= 0.0);
      const double p = psi(f, u);
      CHECK(p >= prev_psi);
      prev_psi = p;
      if (f.bounded()) CHECK(std::fabs(p) <= f.sup_psi());
    }
    // rho nondecreasing in |u|
    double prev_rho = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double r = rho(f, span * i / 2000.0);
      CHECK(r >= prev_rho);
      prev_rho = r;
    }
  }
}

TEST_CASE("finite differences: rho' = psi and psi' matches psi") {
  std::mt19937_64 rng(12);
  for (const auto& f : all_families()) {
    if (f.is_exact_l1()) continue;
    CAPTURE(f.name());
    // Steps small against the transition band, which has width 1/m^2.
    const double span = f.kind() == FamilyKind::SmoothedL1 ? 3.0 / f.m() : 3.0;
    const double band = f.kind() == FamilyKind::SmoothedL1 ? 1.0 / (f.m() * f.m())
                        : f.kind() == FamilyKind::SmoothedHuber ? f.k() / f.m() : 1.0;
    const double h = 1e-4 * band;
    std::uniform_real_distribution<double> unif(-span, span);
    for (int i = 0; i < 2000; ++i) {
      const double u = unif(rng);
      if (near_breakpoint(f, u, h)) continue;
      const double d_rho = (rho(f, u + h) - rho(f, u - h)) / (2.0 * h);
      CHECK(d_rho == doctest::Approx(psi(f, u)).epsilon(1e-6).scale(1.0));
      const double d_psi = (psi(f, u + h) - psi(f, u - h)) / (2.0 * h);
      CHECK(d_psi == doctest::Approx(psi_prime(f, u)).epsilon(1e-5).scale(psi_prime(f, 0.0)));
    }
  }
}

TEST_CASE("smoothed families are C2 across the transition band") {
  for (const auto& f : {ScoreFamily::smoothed_l1(30.0), ScoreFamily::smoothed_huber(0.98, 10.0)}) {
    CAPTURE(f.name());
    for (double b : f.breakpoints()) {
      const double h = 1e-9 * b;
      CHECK(psi(f, b - h) == doctest::Approx(psi(f, b + h)).epsilon(1e-7));
      CHECK(psi_prime(f, b - h) == doctest::Approx(psi_prime(f, b + h)).scale(psi_prime(f, 0.0)).epsilon(1e-6));
    }
  }
}

TEST_CASE("smoothed L1 tends to sign") {
  for (double u : {-0.3, -1e-3, 2e-5, 0.7}) {
    const double m = 2.5 / std::fabs(u);  // 1/m < |u|/2
    CHECK(std::fabs(psi(ScoreFamily::smoothed_l1(m), u) - (u > 0 ? 1.0 : -1.0)) < 1e-9);
  }
  CHECK(psi(ScoreFamily::l1(), -3.0) == -1.0);
  CHECK(rho(ScoreFamily::l1(), -3.0) == 3.0);
}

TEST_CASE("smoothed Huber agrees with Huber away from the corner") {
  const auto exact = ScoreFamily::huber(0.98);
  const auto smooth = ScoreFamily::smoothed_huber(0.98, 1000.0);
  for (double u : {0.0, 0.3, -0.9, 1.5, -7.0}) {
    CHECK(psi(smooth, u) == doctest::Approx(psi(exact, u)).epsilon(1e-12));
  }
  CHECK(rho(smooth, 0.5) == doctest::Approx(rho(exact, 0.5)).epsilon(1e-12));
  CHECK(rho(smooth, 5.0) == doctest::Approx(rho(exact, 5.0)).epsilon(1e-6));
}

TEST_CASE("family names parse back") {
  for (const auto& f : all_families()) CHECK(ScoreFamily::parse(f.name()) == f);
  CHECK(ScoreFamily::parse("huber:k=0.98") == ScoreFamily::huber(0.98));
  CHECK(ScoreFamily::parse("sl1:m=1000") == ScoreFamily::smoothed_l1(1000.0));
  CHECK(ScoreFamily::parse("sl1:m=inf").is_exact_l1());
  CHECK(ScoreFamily::parse("shuber:k=0.98,m=1000") == ScoreFamily::smoothed_huber(0.98, 1000.0));
  CHECK_THROWS_AS(ScoreFamily::parse("tukey:c=4.6"), ParseError);
  CHECK_THROWS_AS(ScoreFamily::parse("huber"), ParseError);
  CHECK_THROWS_AS(ScoreFamily::parse("huber:k=abc"), ParseError);
  CHECK_THROWS_AS(ScoreFamily::parse("huber:q=1"), ParseError);
  CHECK_THROWS_AS(ScoreFamily::parse("huber:k=-1"), ConfigError);
  CHECK_THROWS_AS(ScoreFamily::parse("sl1:m=1"), ConfigError);
  CHECK_THROWS_AS(ScoreFamily::parse("shuber:k=1,m=inf"), ConfigError);
}
