#include "isoreg/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "isoreg/error.hpp"

namespace isoreg {

DesignSample::DesignSample(std::vector<double> t, std::vector<double> x) {
  if (t.size() != x.size()) throw DomainError("t and x differ in length");
  if (t.empty()) throw InsufficientData("design sample needs at least one observation");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(x[i])) {
      throw DomainError("non-finite value in observation " + std::to_string(i));
    }
  }
  index_.resize(t.size());
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  std::stable_sort(index_.begin(), index_.end(),
                   [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  t_.reserve(t.size());
  x_.reserve(x.size());
  for (auto i : index_) {
    t_.push_back(t[i]);
    x_.push_back(x[i]);
  }
}

DesignSample DesignSample::with_responses(std::vector<double> x_sorted) const {
  if (x_sorted.size() != x_.size()) throw DomainError("response count does not match design");
  for (double v : x_sorted) {
    if (!std::isfinite(v)) throw DomainError("non-finite response");
  }
  DesignSample out;
  out.t_ = t_;
  out.x_ = std::move(x_sorted);
  out.index_ = index_;
  return out;
}

}  // namespace isoreg
