#ifndef OUTAGE_WEIGHTS_HPP
#define OUTAGE_WEIGHTS_HPP

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "outage/error.hpp"

namespace outage {

/// Power allocation q over t antennas: non-negative entries summing to at
/// most one. The equality simplex (sum exactly one) is reported by
/// on_equality_simplex() rather than enforced.
class Weights {
 public:
  static constexpr double kSumSlack = 1e-12;

  Weights() = default;

  explicit Weights(std::vector<double> values) : values_(std::move(values)) {
    validate();
  }

  Weights(std::initializer_list<double> values) : values_(values) {
    validate();
  }

  /// (1/k, ..., 1/k, 0, ..., 0) with t entries.
  static Weights uniform(std::size_t k, std::size_t t) {
    if (k == 0 || k > t) {
      throw DomainError("uniform allocation needs 1 <= k <= t");
    }
    std::vector<double> v(t, 0.0);
    for (std::size_t i = 0; i < k; ++i) v[i] = 1.0 / static_cast<double>(k);
    return Weights(std::move(v));
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_.at(i); }

  double sum() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
  }

  bool on_equality_simplex(double tol = kSumSlack) const {
    return std::abs(sum() - 1.0) <= tol;
  }

  std::vector<std::size_t> active_set() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] > 0.0) idx.push_back(i);
    }
    return idx;
  }

  bool all_positive() const {
    for (double v : values_) {
      if (!(v > 0.0)) return false;
    }
    return true;
  }

  const std::vector<double>& vector() const noexcept { return values_; }

 private:
  void validate() const {
    if (values_.empty()) {
      throw InvalidWeights("weights must have at least one entry",
                           InvalidWeights::npos);
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidWeights("weight entry " + std::to_string(i) +
                                 " is negative or not finite",
                             i);
      }
    }
    if (sum() > 1.0 + kSumSlack) {
      throw InvalidWeights("weights sum to more than one (sum = " +
                               std::to_string(sum()) + ")",
                           InvalidWeights::npos);
    }
  }

  std::vector<double> values_;
};

}  // namespace outage

#endif  // OUTAGE_WEIGHTS_HPP
