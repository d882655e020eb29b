#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lawrisk/detail/summation.hpp"
#include "lawrisk/error.hpp"

namespace lawrisk {

/// A random variable on ([0,1], Lebesgue) given by n equally likely atoms.
class SampleVector {
public:
  explicit SampleVector(std::vector<double> values) : values_(std::move(values)) {
    detail::require(!values_.empty(), "sample vector must be nonempty");
    for (double v : values_) detail::require(std::isfinite(v), "sample vector values must be finite");
  }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double mean() const { return detail::compensated_sum(values_) / static_cast<double>(values_.size()); }

  friend bool operator==(const SampleVector&, const SampleVector&) = default;

private:
  std::vector<double> values_;
};

} // namespace lawrisk
