#ifndef OUTAGE_HYPOEXP_HPP
#define OUTAGE_HYPOEXP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "outage/detail/special.hpp"
#include "outage/detail/uniformization.hpp"
#include "outage/error.hpp"
#include "outage/weights.hpp"

namespace outage {

/// One group of equal weights: weight * (sum of `multiplicity` unit
/// exponentials), i.e. a scaled Erlang variable.
struct Atom {
  double weight = 0.0;
  int multiplicity = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Law of a weighted sum of i.i.d. unit-rate exponentials, stored as atoms
/// of distinct weights (generalized Erlang / hypoexponential law).
///
/// Construction clusters weights whose relative gap is below
/// kClusterGap, sorts ascending and precomputes the partial-fraction
/// expansion of the Laplace transform
///   prod_i (1 + s w_i)^{-m_i} = sum_i sum_{r=1}^{m_i} c_{i,r} / (s + 1/w_i)^r,
/// so the density is sum_{i,r} c_{i,r} x^{r-1} e^{-x/w_i} / (r-1)!.
/// Instances are immutable.
class WeightedExpSum {
 public:
  static constexpr double kClusterGap = 1e-9;
  /// Above this cancellation ratio (sum of |terms| over |result|) the
  /// closed form hands over to the uniformization backend.
  static constexpr double kConditionLimit = 1e4;

  explicit WeightedExpSum(std::vector<Atom> atoms) {
    for (const Atom& a : atoms) {
      if (!(a.weight > 0.0) || !std::isfinite(a.weight) || a.multiplicity < 1) {
        throw DomainError("atoms need a positive weight and multiplicity");
      }
    }
    if (atoms.empty()) {
      throw DegenerateDistribution("law with no exponential terms");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.weight < b.weight; });
    // Cluster near-equal neighbours into a single atom at the weighted mean.
    for (const Atom& a : atoms) {
      if (!atoms_.empty()) {
        Atom& back = atoms_.back();
        if ((a.weight - back.weight) / a.weight < kClusterGap) {
          const int m = back.multiplicity + a.multiplicity;
          back.weight = (back.weight * back.multiplicity +
                         a.weight * a.multiplicity) /
                        m;
          back.multiplicity = m;
          continue;
        }
      }
      atoms_.push_back(a);
    }
    expand();
  }

  std::span<const Atom> atoms() const noexcept { return atoms_; }

  int total_multiplicity() const noexcept {
    int m = 0;
    for (const Atom& a : atoms_) m += a.multiplicity;
    return m;
  }

  double mean() const noexcept {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.weight * a.multiplicity;
    return s;
  }

  double variance() const noexcept {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.weight * a.weight * a.multiplicity;
    return s;
  }

  double max_weight() const noexcept { return atoms_.back().weight; }
  double min_weight() const noexcept { return atoms_.front().weight; }

  /// Law of this sum plus sum_j extra[j] * X~_j with fresh exponentials.
  /// Zero entries of `extra` are dropped.
  WeightedExpSum augmented(std::span<const double> extra) const {
    std::vector<Atom> a(atoms_.begin(), atoms_.end());
    for (double w : extra) {
      if (w < 0.0 || !std::isfinite(w)) {
        throw DomainError("augmentation weights must be non-negative");
      }
      if (w > 0.0) a.push_back({w, 1});
    }
    return WeightedExpSum(std::move(a));
  }

  WeightedExpSum augmented(std::initializer_list<double> extra) const {
    return augmented(std::span<const double>(extra.begin(), extra.size()));
  }

  /// Closed-form evaluation of f^{(order)}(x), x > 0. Empty when the
  /// cancellation ratio exceeds kConditionLimit.
  std::optional<double> closed_form_derivative(double x, int order) const {
    detail::CompensatedSum acc, density_acc;
    double magnitude = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const double rate = 1.0 / atoms_[i].weight;
      const double decay = std::exp(-rate * x);
      const auto& c = coeffs_[i];
      double pw = 1.0;  // x^{r-1}/(r-1)!
      std::vector<double> powers(c.size());
      for (std::size_t r = 0; r < c.size(); ++r) {
        if (r > 0) pw *= x / static_cast<double>(r);
        powers[r] = pw;
      }
      for (std::size_t r = 0; r < c.size(); ++r) {
        density_acc.add(c[r] * powers[r] * decay);
        // d^n/dx^n [x^a e^{-rate x}/a!] = sum_j C(n,j) x^{a-j}/(a-j)! (-rate)^{n-j}
        const int a = static_cast<int>(r);
        for (int j = 0; j <= std::min(order, a); ++j) {
          const double term = c[r] * detail::binomial(order, j) *
                              powers[static_cast<std::size_t>(a - j)] *
                              std::pow(-rate, order - j) * decay;
          acc.add(term);
          magnitude += std::abs(term);
        }
      }
    }
    const double value = acc.value();
    const double scale =
        std::abs(value) +
        std::abs(density_acc.value()) * std::pow(1.0 / min_weight(), order);
    // Deep tail: every term is near underflow and only absolute accuracy
    // is meaningful.
    if (magnitude < 1e-250) return value;
    if (magnitude > kConditionLimit * scale || scale == 0.0) {
      return std::nullopt;
    }
    return value;
  }

  /// Closed-form CDF (or complementary CDF when better conditioned).
  std::optional<double> closed_form_cdf(double x) const {
    detail::CompensatedSum lower, upper;
    double lower_mag = 0.0, upper_mag = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const double rate = 1.0 / atoms_[i].weight;
      const auto& c = coeffs_[i];
      for (std::size_t r = 0; r < c.size(); ++r) {
        const auto order = static_cast<std::int64_t>(r + 1);
        const auto g = detail::regularized_gamma(order, rate * x);
        const double scale = c[r] * std::pow(atoms_[i].weight, order);
        lower.add(scale * g.lower);
        upper.add(scale * g.upper);
        lower_mag += std::abs(scale * g.lower);
        upper_mag += std::abs(scale * g.upper);
      }
    }
    const double f = lower.value();
    const double s = upper.value();
    // Sum whichever tail is the smaller one; the other is its complement.
    if (s < 0.5) {
      if (s >= 0.0 && upper_mag <= kConditionLimit * std::max(s, 1e-300)) {
        return std::clamp(1.0 - s, 0.0, 1.0);
      }
      if (upper_mag < 1e-17) return 1.0;
    }
    if (f > 0.0 && lower_mag <= kConditionLimit * f) return std::min(f, 1.0);
    return std::nullopt;
  }

  detail::Uniformization uniformized() const {
    std::vector<double> rates;
    for (const Atom& a : atoms_) {
      for (int m = 0; m < a.multiplicity; ++m) rates.push_back(1.0 / a.weight);
    }
    return detail::Uniformization(std::move(rates));
  }

  /// Partial-fraction coefficients c_{i,r}, r = 1..m_i, per atom.
  std::span<const std::vector<double>> coefficients() const noexcept {
    return coeffs_;
  }

 private:
  // c_{i,r} = rate_i^{m_i} * B_i * [h^{m_i - r}] prod_{j != i} (1 + a_j h)^{-m_j}
  // with a_j = 1/(rate_j - rate_i) and B_i = prod_{j != i} (w_i/(w_i - w_j))^{m_j}.
  void expand() {
    coeffs_.clear();
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const double wi = atoms_[i].weight;
      const int mi = atoms_[i].multiplicity;
      const double rate = 1.0 / wi;
      std::vector<double> series(static_cast<std::size_t>(mi), 0.0);
      series[0] = 1.0;
      double b = 1.0;
      for (std::size_t j = 0; j < atoms_.size(); ++j) {
        if (j == i) continue;
        const double wj = atoms_[j].weight;
        const int mj = atoms_[j].multiplicity;
        b *= std::pow(wi / (wi - wj), mj);
        const double aj = wi * wj / (wi - wj);
        // (1 + a h)^{-m} = sum_n C(m+n-1, n) (-a)^n h^n
        std::vector<double> factor(series.size());
        double pw = 1.0;
        for (std::size_t n = 0; n < factor.size(); ++n) {
          factor[n] = detail::binomial(mj + static_cast<int>(n) - 1,
                                       static_cast<int>(n)) *
                      pw;
          pw *= -aj;
        }
        std::vector<double> prod(series.size(), 0.0);
        for (std::size_t u = 0; u < series.size(); ++u) {
          for (std::size_t v = 0; u + v < series.size(); ++v) {
            prod[u + v] += series[u] * factor[v];
          }
        }
        series = std::move(prod);
      }
      std::vector<double> c(static_cast<std::size_t>(mi));
      const double lead = std::pow(rate, mi) * b;
      for (int r = 1; r <= mi; ++r) {
        c[static_cast<std::size_t>(r - 1)] =
            lead * series[static_cast<std::size_t>(mi - r)];
      }
      coeffs_.push_back(std::move(c));
    }
  }

  std::vector<Atom> atoms_;
  std::vector<std::vector<double>> coeffs_;
};

/// Law of <q, X> plus optional augmentation terms aug_j * X~_j.
inline WeightedExpSum from_weights(const Weights& q,
                                   std::span<const double> augment = {}) {
  std::vector<Atom> atoms;
  for (double w : q.values()) {
    if (w > 0.0) atoms.push_back({w, 1});
  }
  for (double w : augment) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("augmentation weights must be positive");
    }
    atoms.push_back({w, 1});
  }
  if (atoms.empty()) {
    throw DegenerateDistribution(
        "all weights are zero: <q, X> is the point mass at 0");
  }
  return WeightedExpSum(std::move(atoms));
}

inline WeightedExpSum from_weights(const Weights& q,
                                   std::initializer_list<double> augment) {
  return from_weights(q,
                      std::span<const double>(augment.begin(), augment.size()));
}

/// Density f(x). Zero on the negative axis; at x = 0 the right limit, which
/// is 1/w for a single exponential and 0 otherwise.
inline double density(const WeightedExpSum& d, double x) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    return d.total_multiplicity() == 1 ? 1.0 / d.atoms()[0].weight : 0.0;
  }
  if (auto v = d.closed_form_derivative(x, 0)) return std::max(*v, 0.0);
  return std::max(d.uniformized().derivative(x, 0), 0.0);
}

/// f^{(order)}(x); order 0 is the density.
inline double density_derivative(const WeightedExpSum& d, double x,
                                  int order = 1) {
  if (order < 0) throw DomainError("derivative order must be non-negative");
  if (order == 0) return density(d, x);
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    // f is C^{m-2} at the origin: f^{(j)}(0) = 0 for j <= m-2.
    if (order > d.total_multiplicity() - 2) {
      throw Discontinuity("density derivative of this order jumps at x = 0");
    }
    return 0.0;
  }
  if (auto v = d.closed_form_derivative(x, order)) return *v;
  return d.uniformized().derivative(x, order);
}

/// P{S <= x}.
inline double cdf(const WeightedExpSum& d, double x) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (auto v = d.closed_form_cdf(x)) return *v;
  return d.uniformized().cdf(x);
}

struct ModeResult {
  double mode = 0.0;
  double derivative_at_mode = 0.0;
};

/// Location of the unique maximum of the density (total multiplicity >= 2).
inline ModeResult mode(const WeightedExpSum& d) {
  if (d.total_multiplicity() < 2) {
    throw NoInteriorMode("a single exponential has a monotone density");
  }
  if (d.atoms().size() == 1) {
    const Atom& a = d.atoms()[0];
    const double m = (a.multiplicity - 1) * a.weight;
    return {m, density_derivative(d, m, 1)};
  }
  // Grid scan for the sign change of f', then bisection.
  const double hi_end = d.mean() + 10.0 * std::sqrt(d.variance());
  constexpr int kGrid = 1000;
  double lo = 0.0, hi = hi_end;
  for (int i = 1; i <= kGrid; ++i) {
    const double xi = hi_end * i / kGrid;
    if (density_derivative(d, xi, 1) <= 0.0) {
      hi = xi;
      lo = hi_end * (i - 1) / kGrid;
      break;
    }
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (density_derivative(d, mid, 1) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double m = 0.5 * (lo + hi);
  return {m, density_derivative(d, m, 1)};
}

/// Outage of the uniform allocation over k antennas:
///   P{(1/k) sum_{i<=k} X_i <= x} = 1 - e^{-kx} sum_{l<k} (kx)^l / l!.
inline double erlang_outage(int k, double x) {
  if (k < 1) throw DomainError("erlang_outage needs k >= 1");
  if (x <= 0.0) return 0.0;
  return detail::regularized_gamma(k, k * x).lower;
}

/// 1 - erlang_outage(k, x), with full relative accuracy in the tail.
inline double erlang_survival(int k, double x) {
  if (k < 1) throw DomainError("erlang_survival needs k >= 1");
  if (x <= 0.0) return 1.0;
  return detail::regularized_gamma(k, k * x).upper;
}

}  // namespace outage

#endif  // OUTAGE_HYPOEXP_HPP
