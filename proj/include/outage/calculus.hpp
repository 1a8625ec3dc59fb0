#ifndef OUTAGE_CALCULUS_HPP
#define OUTAGE_CALCULUS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "outage/error.hpp"
#include "outage/hypoexp.hpp"
#include "outage/weights.hpp"

namespace outage {

/// P{<q, X> <= x}. An all-zero q is the point mass at 0.
inline double outage_probability(const Weights& q, double x) {
  bool any = false;
  for (double v : q.values()) any = any || v > 0.0;
  if (!any) return x >= 0.0 ? 1.0 : 0.0;
  return cdf(from_weights(q), x);
}

/// dP{<q,X> <= x}/dq_k = -f_{<q,X> + q_k X~}(x).
///
/// A zero coordinate uses the limit q_k -> 0+, i.e. -f_{<q,X>}(x).
inline double outage_partial(const Weights& q, std::size_t k, double x) {
  if (k >= q.dim()) throw DomainError("coordinate index out of range");
  const double qk = q[k];
  if (qk > 0.0) return -density(from_weights(q, {qk}), x);
  return -density(from_weights(q), x);
}

/// Full gradient of the outage probability; every q_k must be positive.
inline std::vector<double> outage_gradient(const Weights& q, double x) {
  if (!q.all_positive()) {
    throw DomainError(
        "outage_gradient needs strictly positive weights; restrict q to its "
        "support first");
  }
  std::vector<double> g(q.dim());
  for (std::size_t k = 0; k < q.dim(); ++k) g[k] = outage_partial(q, k, x);
  return g;
}

namespace detail {

// Density at x > 0 of base + extra terms; an empty law is the point mass
// at zero and has density 0 on the positive axis.
inline double augmented_density(const std::optional<WeightedExpSum>& base,
                                std::initializer_list<double> extra,
                                double x, int order) {
  std::vector<Atom> atoms;
  if (base) atoms.assign(base->atoms().begin(), base->atoms().end());
  for (double w : extra) {
    if (w > 0.0) atoms.push_back({w, 1});
  }
  if (atoms.empty()) return 0.0;
  return density_derivative(WeightedExpSum(std::move(atoms)), x, order);
}

}  // namespace detail

/// |f_{Y+q1X1}(x) - f_{Y+q2X2}(x) - (q2 - q1) f'_{Y+q1X1+q2X2}(x)|,
/// Y distributed as `base` (std::nullopt for Y = 0).
inline double lemma2_residual(const std::optional<WeightedExpSum>& base,
                              double q1, double q2, double x) {
  if (q1 < 0.0 || q2 < 0.0) {
    throw DomainError("lemma2_residual needs non-negative weights");
  }
  if (!base && q1 == 0.0 && q2 == 0.0) {
    throw PreconditionError("Y = 0 with both weights zero is a point mass");
  }
  if (x <= 0.0) {
    throw DomainError("lemma2_residual is evaluated on the positive axis");
  }
  const double lhs = detail::augmented_density(base, {q1}, x, 0) -
                     detail::augmented_density(base, {q2}, x, 0);
  const double rhs =
      (q2 - q1) * detail::augmented_density(base, {q1, q2}, x, 1);
  return std::abs(lhs - rhs);
}

/// First-order optimality of q on the equality simplex.
struct KtReport {
  double lambda = 0.0;
  std::vector<std::size_t> active_set;
  std::vector<double> partials;
  double stationarity_residual = 0.0;
  double inactive_violation = 0.0;
  double tol = 0.0;
  bool satisfied = false;
};

/// Kuhn-Tucker check: all active partials equal lambda, inactive ones are
/// >= lambda. lambda is the mean of the active partials.
inline KtReport kt_check(const Weights& q, double x, double tol = 1e-8) {
  if (!q.on_equality_simplex()) {
    throw PreconditionError("kt_check needs q on the equality simplex");
  }
  KtReport r;
  r.tol = tol;
  r.active_set = q.active_set();
  if (r.active_set.empty()) throw DomainError("empty active set");
  r.partials.resize(q.dim());
  for (std::size_t k = 0; k < q.dim(); ++k) {
    r.partials[k] = outage_partial(q, k, x);
  }
  double s = 0.0;
  for (std::size_t k : r.active_set) s += r.partials[k];
  r.lambda = s / static_cast<double>(r.active_set.size());
  for (std::size_t k = 0; k < q.dim(); ++k) {
    if (q[k] > 0.0) {
      r.stationarity_residual =
          std::max(r.stationarity_residual, std::abs(r.partials[k] - r.lambda));
    } else {
      r.inactive_violation =
          std::max(r.inactive_violation, std::max(0.0, r.lambda - r.partials[k]));
    }
  }
  r.satisfied = r.stationarity_residual <= tol && r.inactive_violation <= tol;
  return r;
}

/// d^2/d delta^2 at 0 of P{<q + delta e_i - delta e_j, X> <= x} for
/// q_i = q_j = p > 0, which equals 2 f'_{<q,X> + p X~1 + p X~2}(x).
inline double symmetric_perturbation_second_derivative(const Weights& q,
                                                       std::size_t i,
                                                       std::size_t j,
                                                       double x) {
  if (i >= q.dim() || j >= q.dim() || i == j) {
    throw PreconditionError("need two distinct coordinates");
  }
  const double p = q[i];
  if (!(p > 0.0) || std::abs(q[j] - p) > 1e-12 * p) {
    throw PreconditionError("perturbed coordinates must be equal and positive");
  }
  return 2.0 * density_derivative(from_weights(q, {p, p}), x, 1);
}

}  // namespace outage

#endif  // OUTAGE_CALCULUS_HPP
