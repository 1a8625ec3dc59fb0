#ifndef OUTAGE_DETAIL_SPECIAL_HPP
#define OUTAGE_DETAIL_SPECIAL_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace outage::detail {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(y^n e^{-y} / n!), the log Poisson mass at n for mean y.
inline double log_poisson_mass(std::int64_t n, double y) {
  if (y == 0.0) {
    return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(n) * std::log(y) - y -
         std::lgamma(static_cast<double>(n) + 1.0);
}

struct GammaPair {
  double lower;  // P(n, y)
  double upper;  // Q(n, y)
};

/// Regularized incomplete gamma functions for integer order n >= 1.
///
/// The smaller of the two tails is summed directly as a series of positive
/// Poisson masses, so it keeps full relative accuracy; the other one is its
/// complement.
inline GammaPair regularized_gamma(std::int64_t n, double y) {
  if (y <= 0.0) return {0.0, 1.0};
  if (std::isinf(y)) return {1.0, 0.0};
  const double dn = static_cast<double>(n);
  if (y < dn) {
    // P(n, y) = sum_{l >= n} e^{-y} y^l / l!, terms decrease for l > y.
    double term = std::exp(log_poisson_mass(n, y));
    CompensatedSum acc;
    for (std::int64_t l = n; term > 0.0; ++l) {
      acc.add(term);
      term *= y / static_cast<double>(l + 1);
      if (term < acc.value() * 1e-18) break;
    }
    const double p = acc.value();
    return {p, 1.0 - p};
  }
  // Q(n, y) = sum_{l < n} e^{-y} y^l / l!, walked downward from l = n - 1.
  double term = std::exp(log_poisson_mass(n - 1, y));
  CompensatedSum acc;
  for (std::int64_t l = n - 1; l >= 0 && term > 0.0; --l) {
    acc.add(term);
    if (l == 0) break;
    term *= static_cast<double>(l) / y;
    if (term < acc.value() * 1e-18) break;
  }
  const double q = acc.value();
  return {1.0 - q, q};
}

/// Remainder of the order-k Taylor polynomial of e^{-y}:
///   e^{-y} - sum_{l=0}^{k} (-y)^l / l!.
///
/// For y >= 0 this equals (-1)^{k+1} e^{-y} y^{k+1}/(k+1)! 1F1(k+1; k+2; y)
/// (Kummer transform), a series of positive terms.
inline double exp_taylor_remainder(int k, double y) {
  if (y == 0.0) return 0.0;
  const double sign = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
  if (y < 0.0 || y > 600.0) {
    // Polynomial-dominated regime (or negative argument): direct sum.
    CompensatedSum acc;
    acc.add(std::exp(-y));
    double term = 1.0;
    for (int l = 0; l <= k; ++l) {
      if (l > 0) term *= -y / static_cast<double>(l);
      acc.add(-term);
    }
    return acc.value();
  }
  // e^{-y} y^{k+1}/(k+1)! * sum_n (k+1)/(k+1+n) y^n/n!
  const double lead = std::exp(log_poisson_mass(k + 1, y));
  CompensatedSum acc;
  double pw = 1.0;  // y^n / n!
  for (int n = 0;; ++n) {
    if (n > 0) pw *= y / static_cast<double>(n);
    const double term = pw * static_cast<double>(k + 1) / (k + 1 + n);
    acc.add(term);
    if (static_cast<double>(n) > y && term < acc.value() * 1e-18) break;
  }
  return sign * lead * acc.value();
}

/// Standard normal CDF.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// Binomial coefficient as a double.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

}  // namespace outage::detail

#endif  // OUTAGE_DETAIL_SPECIAL_HPP
