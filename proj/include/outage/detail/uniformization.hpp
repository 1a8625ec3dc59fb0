#ifndef OUTAGE_DETAIL_UNIFORMIZATION_HPP
#define OUTAGE_DETAIL_UNIFORMIZATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "outage/detail/special.hpp"
#include "outage/error.hpp"

namespace outage::detail {

/// Phase-type evaluation of a sum of exponential phases by uniformization.
///
/// The phases are visited in series; with Lambda the largest rate the
/// transient generator is T = Lambda (P - I) with P entrywise non-negative,
/// so e^{Tx} = sum_k Pois(k; Lambda x) P^k. Density and CDF are then sums of
/// non-negative terms and carry no cancellation, whatever the spacing of the
/// rates. Derivatives use f^{(r)}(x) = alpha e^{Tx} T^r t0.
class Uniformization {
 public:
  explicit Uniformization(std::vector<double> rates)
      : rates_(std::move(rates)) {
    lambda_ = *std::max_element(rates_.begin(), rates_.end());
  }

  /// f^{(order)}(x) for x > 0 (order 0 is the density).
  double derivative(double x, int order) const {
    const auto n = rates_.size();
    // v = T^order t0, with t0 = (0, ..., 0, rate_last).
    std::vector<double> v(n, 0.0);
    v[n - 1] = rates_[n - 1];
    for (int r = 0; r < order; ++r) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = -rates_[i] * v[i];
        if (i + 1 < n) w[i] += rates_[i] * v[i + 1];
      }
      v = std::move(w);
    }
    CompensatedSum acc;
    walk(x, [&](double pois, std::span<const double> pi, double) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += pi[i] * v[i];
      acc.add(pois * dot);
    });
    return acc.value();
  }

  /// P{S <= x} for x > 0.
  double cdf(double x) const {
    CompensatedSum acc;
    walk(x, [&](double pois, std::span<const double>, double absorbed) {
      acc.add(pois * absorbed);
    });
    return std::min(acc.value(), 1.0);
  }

 private:
  template <class Visit>
  void walk(double x, Visit&& visit) const {
    const auto n = rates_.size();
    const double mean = lambda_ * x;
    const auto last = static_cast<std::int64_t>(
        std::ceil(mean + 12.0 * std::sqrt(mean) + 40.0));
    if (last > 50'000'000) {
      throw AccuracyError("uniformization needs too many Poisson terms");
    }
    // Poisson weights, built outward from the mode to avoid underflow.
    std::vector<double> pois(static_cast<std::size_t>(last) + 1, 0.0);
    const auto mode = static_cast<std::int64_t>(std::floor(mean));
    pois[static_cast<std::size_t>(mode)] = std::exp(log_poisson_mass(mode, mean));
    for (std::int64_t k = mode + 1; k <= last; ++k) {
      pois[static_cast<std::size_t>(k)] =
          pois[static_cast<std::size_t>(k - 1)] * mean / static_cast<double>(k);
    }
    for (std::int64_t k = mode - 1; k >= 0; --k) {
      pois[static_cast<std::size_t>(k)] =
          pois[static_cast<std::size_t>(k + 1)] * static_cast<double>(k + 1) /
          mean;
    }

    std::vector<double> pi(n, 0.0), next(n, 0.0);
    pi[0] = 1.0;
    double absorbed = 0.0;
    for (std::int64_t k = 0; k <= last; ++k) {
      visit(pois[static_cast<std::size_t>(k)], std::span<const double>(pi),
            absorbed);
      absorbed += pi[n - 1] * rates_[n - 1] / lambda_;
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = pi[i] * (1.0 - rates_[i] / lambda_);
        if (i > 0) next[i] += pi[i - 1] * rates_[i - 1] / lambda_;
      }
      std::swap(pi, next);
    }
  }

  std::vector<double> rates_;
  double lambda_ = 0.0;
};

}  // namespace outage::detail

#endif  // OUTAGE_DETAIL_UNIFORMIZATION_HPP
