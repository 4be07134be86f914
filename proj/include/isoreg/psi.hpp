#pragma once

// Score families for isotonic M-estimation: the loss rho, its derivative
// psi and the score slope psi'.
//
//   l2              rho(u) = u^2, psi(u) = 2u
//   huber:k=K       psi(u) = sign(u) min(|u|, K)
//   sl1:m=M         smoothed sign: slope M on |u| <= 1/M - 1/M^2, saturates
//                   at +-1 from |u| >= 1/M, quintic Hermite blend in between
//   sl1:m=inf, l1   exact L1 (psi = sign); solved by block medians
//   shuber:k=K,m=M  Huber with the corner at K smoothed over width K/M
//
// The blend on the transition band [1/M - 1/M^2, 1/M] is the quintic that
// matches value, slope and curvature at both ends, so psi is C^2 and
// monotone. Band endpoints are closed on both sides.

#include <string>
#include <string_view>
#include <vector>

namespace isoreg {

enum class FamilyKind { L2, Huber, SmoothedL1, SmoothedHuber };

class ScoreFamily {
 public:
  static ScoreFamily l2();
  static ScoreFamily huber(double k);
  /// `m` may be +infinity, which selects the exact L1 estimator.
  static ScoreFamily smoothed_l1(double m);
  static ScoreFamily l1();
  static ScoreFamily smoothed_huber(double k, double m);

  /// Parses `l2`, `l1`, `huber:k=0.98`, `sl1:m=1000`, `shuber:k=0.98,m=1000`.
  static ScoreFamily parse(std::string_view text);

  FamilyKind kind() const { return kind_; }
  double k() const { return k_; }
  double m() const { return m_; }

  bool is_exact_l1() const;
  bool bounded() const { return kind_ != FamilyKind::L2; }
  /// sup |psi|; infinite for L2.
  double sup_psi() const;

  /// Nonnegative points where psi or psi' is not smooth, ascending.
  std::vector<double> breakpoints() const;

  /// Canonical name, parseable back by `parse`.
  std::string name() const;

  friend bool operator==(const ScoreFamily&, const ScoreFamily&) = default;

 private:
  ScoreFamily(FamilyKind kind, double k, double m) : kind_(kind), k_(k), m_(m) {}

  FamilyKind kind_;
  double k_;
  double m_;
};

double rho(const ScoreFamily& f, double u);
double psi(const ScoreFamily& f, double u);
/// Huber's psi' is 0 at |u| = k; exact L1 reports 0 everywhere (the point
/// mass at 0 is handled in closed form where it matters).
double psi_prime(const ScoreFamily& f, double u);

/// Shortest round-trip decimal text for `v` ("inf" for infinity).
std::string format_number(double v);

}  // namespace isoreg
