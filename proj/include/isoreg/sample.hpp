#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace isoreg {

/// Observation points t with responses x, held in nondecreasing t order.
/// Ties keep their input order; `original_index` maps back to the input.
class DesignSample {
 public:
  DesignSample(std::vector<double> t, std::vector<double> x);

  std::size_t size() const { return t_.size(); }
  std::span<const double> t() const { return t_; }
  std::span<const double> x() const { return x_; }
  std::span<const std::size_t> original_index() const { return index_; }
  double t(std::size_t i) const { return t_[i]; }
  double x(std::size_t i) const { return x_[i]; }

  /// Same design, new responses given in the stored (sorted) order.
  DesignSample with_responses(std::vector<double> x_sorted) const;

 private:
  DesignSample() = default;

  std::vector<double> t_;
  std::vector<double> x_;
  std::vector<std::size_t> index_;
};

}  // namespace isoreg
