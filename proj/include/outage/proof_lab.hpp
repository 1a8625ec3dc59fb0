#ifndef OUTAGE_PROOF_LAB_HPP
#define OUTAGE_PROOF_LAB_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "outage/calculus.hpp"
#include "outage/detail/special.hpp"
#include "outage/error.hpp"
#include "outage/hypoexp.hpp"

namespace outage {

/// Allocations (p, pbar, ..., pbar) with k copies of pbar = (1 - p)/k,
/// studied for p in (0, 1/(k+1)); at p = 1/(k+1) all entries coincide.
struct TwoValueFamily {
  int k = 1;
  double x = 1.0;

  double uniform_point() const { return 1.0 / (k + 1); }
  double companion(double p) const { return (1.0 - p) / k; }

  /// Law of the member at p; any p in [0, 1) is accepted.
  WeightedExpSum law(double p) const {
    std::vector<Atom> atoms{{companion(p), k}};
    if (p > 0.0) atoms.push_back({p, 1});
    return WeightedExpSum(std::move(atoms));
  }

  /// Law of the member at p augmented by p X~ + pbar X~': weights p twice
  /// and pbar k + 1 times.
  WeightedExpSum augmented_law(double p) const {
    std::vector<Atom> atoms{{companion(p), k + 1}};
    if (p > 0.0) atoms.push_back({p, 2});
    return WeightedExpSum(std::move(atoms));
  }

  Weights member(double p) const {
    std::vector<double> v(static_cast<std::size_t>(k) + 1, companion(p));
    v[0] = p;
    return Weights(std::move(v));
  }
};

inline void check_family(const TwoValueFamily& fam) {
  if (fam.k < 1) throw DomainError("two-value family needs k >= 1");
  if (!(fam.x > 0.0)) throw DomainError("two-value family needs x > 0");
}

/// p -> P{<q(p), X> <= x} on the closed interval [0, 1/(k+1)].
inline double two_value_outage(const TwoValueFamily& fam, double p) {
  check_family(fam);
  if (p < 0.0 || p > fam.uniform_point() * (1.0 + 1e-15)) {
    throw DomainError("p outside [0, 1/(k+1)]");
  }
  return cdf(fam.law(p), fam.x);
}

/// dP/dp along the family. The chain rule over the gradient gives
///   dP/dp = dP/dq_1 - (1/k) sum_{j>=2} dP/dq_j = f_{S+pbar X~}(x) - f_{S+p X~}(x),
/// and the two-weight density identity turns the difference into
/// -(pbar - p) f'_{p,2,k+1}(x),
/// which has no cancellation near the uniform point.
inline double two_value_slope(const TwoValueFamily& fam, double p) {
  check_family(fam);
  const double pbar = fam.companion(p);
  if (pbar == p) return 0.0;
  return -(pbar - p) * density_derivative(fam.augmented_law(p), fam.x, 1);
}

/// Same derivative from the gradient components directly (cross-check).
inline double two_value_slope_chain_rule(const TwoValueFamily& fam, double p) {
  check_family(fam);
  const Weights q = fam.member(p);
  double s = 0.0;
  for (std::size_t j = 1; j < q.dim(); ++j) s += outage_partial(q, j, fam.x);
  return outage_partial(q, 0, fam.x) - s / fam.k;
}

struct ScanReport {
  std::vector<double> extrema;
  int extrema_count = 0;
  /// dP/dp at p = 0+, which equals -(1/k) f'_{(1/k)(X_1+...+X_{k+1})}(x).
  double slope_at_zero = 0.0;
  int sign_at_zero = 0;
  /// d^2P/dp^2 at p = 1/(k+1) by central second differences.
  double curvature_at_uniform = 0.0;
  int curvature_sign = 0;
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Second derivative of p -> P at the uniform point from the family's CDF.
inline double two_value_curvature_fd(const TwoValueFamily& fam,
                                     double step = 1e-4) {
  check_family(fam);
  const double u = fam.uniform_point();
  auto at = [&](double p) { return cdf(fam.law(p), fam.x); };
  return (at(u + step) - 2.0 * at(u) + at(u - step)) / (step * step);
}

/// Closed-form counterpart: (1 + 1/k) f'_{u Erlang(k+3)}(x), u = 1/(k+1).
inline double two_value_curvature_analytic(const TwoValueFamily& fam) {
  check_family(fam);
  const double u = fam.uniform_point();
  return (1.0 + 1.0 / fam.k) *
         density_derivative(WeightedExpSum({{u, fam.k + 3}}), fam.x, 1);
}

/// Interior stationary points of p -> P on (0, 1/(k+1)) and the boundary
/// signs used to rule out minima there.
inline ScanReport scan(const TwoValueFamily& fam, int grid_size = 1000) {
  check_family(fam);
  if (grid_size < 100) throw DomainError("scan needs grid_size >= 100");
  constexpr double kNoise = 1e-13;
  const double u = fam.uniform_point();
  ScanReport r;

  double prev_p = 0.0, prev_v = 0.0;
  bool have_prev = false;
  for (int i = 1; i <= grid_size; ++i) {
    const double p = u * i / (grid_size + 1);
    const double v = two_value_slope(fam, p);
    if (std::abs(v) <= kNoise) continue;
    if (have_prev && sign_of(v) != sign_of(prev_v)) {
      double lo = prev_p, hi = p;
      const int left = sign_of(prev_v);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sign_of(two_value_slope(fam, mid)) == left) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      r.extrema.push_back(0.5 * (lo + hi));
    }
    prev_p = p;
    prev_v = v;
    have_prev = true;
  }
  r.extrema_count = static_cast<int>(r.extrema.size());

  const WeightedExpSum corner({{1.0 / fam.k, fam.k + 1}});
  r.slope_at_zero = -density_derivative(corner, fam.x, 1) / fam.k;
  r.sign_at_zero = sign_of(r.slope_at_zero);
  r.curvature_at_uniform = two_value_curvature_fd(fam);
  r.curvature_sign = sign_of(r.curvature_at_uniform);
  return r;
}

/// Named pieces of the explicit formula for f'_{p,2,k+1}(x).
struct GkEvaluation {
  double delta = 0.0;    // 1/p - 1/pbar
  double log_abs_c = 0.0;  // log |c_k(delta, x)|
  int sign_c = 0;
  double t = 0.0;        // t_k(delta, x)
  double bracket = 0.0;  // ((delta p - delta x)/(k+1) - 1) t_k + (-delta x)^{k+1}/(k+1)!
  double value = 0.0;    // f'_{p,2,k+1}(x)
  bool merged = false;   // delta = 0: evaluated as (1/(k+1)) Erlang(k+3)
};

/// f'_{p,2,k+1}(x), the density derivative of p(X_1 + X_2) + pbar(Y_1 + ...
/// + Y_{k+1}), from its explicit partial-fraction form
///   c_k(delta, x) * [((delta p - delta x)/(k+1) - 1) t_k(delta, x)
///                    + (-delta x)^{k+1}/(k+1)!]
/// with c_k = (k+1) p^{-3} pbar^{-(k+1)} e^{-x/pbar} (-1/delta)^{k+1} / delta.
inline GkEvaluation gk_eval(double p, int k, double x) {
  if (k < 1) throw DomainError("gk_eval needs k >= 1");
  if (!(x > 0.0)) throw DomainError("gk_eval needs x > 0");
  const double u = 1.0 / (k + 1);
  if (!(p > 0.0) || p > u * (1.0 + 1e-15)) {
    throw DomainError("gk_eval needs p in (0, 1/(k+1)]");
  }
  GkEvaluation g;
  const double pbar = (1.0 - p) / k;
  g.delta = 1.0 / p - 1.0 / pbar;
  if (!(g.delta > 0.0) || g.delta * p < 1e-12) {
    g.merged = true;
    g.value = density_derivative(WeightedExpSum({{u, k + 3}}), x, 1);
    return g;
  }
  const double y = g.delta * x;
  g.t = detail::exp_taylor_remainder(k, y);
  const double lead = std::exp(detail::log_poisson_mass(k + 1, y) + y) *
                      (((k + 1) % 2 == 0) ? 1.0 : -1.0);  // (-y)^{k+1}/(k+1)!
  g.bracket = ((g.delta * p - y) / (k + 1) - 1.0) * g.t + lead;
  g.log_abs_c = std::log(k + 1.0) - 3.0 * std::log(p) -
                (k + 1.0) * std::log(pbar) - x / pbar -
                (k + 2.0) * std::log(g.delta);
  g.sign_c = ((k + 1) % 2 == 0) ? 1 : -1;
  if (g.bracket == 0.0) {
    g.value = 0.0;
  } else {
    g.value = g.sign_c * sign_of(g.bracket) *
              std::exp(g.log_abs_c + std::log(std::abs(g.bracket)));
  }
  return g;
}

struct XStarResult {
  double p = 0.0;
  int k = 0;
  double delta = 0.0;
  double xstar = 0.0;
  /// 1 + p(1-p)/((1-p)^2 + p^2 k)
  double lower_bound = 0.0;
  /// |A t_k + (-delta x*)^{k+1}/(k+1)!| / |(-delta x*)^{k+1}/(k+1)!| with
  /// A = (delta p - delta x*)/(k+1) - 1, the defining relation of x*.
  double residual = 0.0;
};

inline double xstar_lower_bound(double p, int k) {
  return 1.0 + p * (1.0 - p) / ((1.0 - p) * (1.0 - p) + p * p * k);
}

/// Mode x* of f_{p,2,k+1}: the unique root of gk_eval(p, k, .) on (0, inf).
inline XStarResult xstar(double p, int k) {
  if (k < 1) throw DomainError("xstar needs k >= 1");
  const double u = 1.0 / (k + 1);
  if (!(p > 0.0) || !(p < u)) throw DomainError("xstar needs p in (0, 1/(k+1))");
  const double pbar = (1.0 - p) / k;
  const double mean = 2.0 * p + (k + 1.0) * pbar;
  const double sd = std::sqrt(2.0 * p * p + (k + 1.0) * pbar * pbar);
  const double end = mean + 10.0 * sd;

  constexpr int kGrid = 1000;
  double lo = 0.0, hi = end;
  for (int i = 1; i <= kGrid; ++i) {
    const double xi = end * i / kGrid;
    if (gk_eval(p, k, xi).value <= 0.0) {
      lo = end * (i - 1) / kGrid;
      hi = xi;
      break;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (gk_eval(p, k, mid).value > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  XStarResult r;
  r.p = p;
  r.k = k;
  r.xstar = 0.5 * (lo + hi);
  r.lower_bound = xstar_lower_bound(p, k);
  const GkEvaluation g = gk_eval(p, k, r.xstar);
  r.delta = g.delta;
  const double y = g.delta * r.xstar;
  const double lead = std::exp(detail::log_poisson_mass(k + 1, y) + y) *
                      (((k + 1) % 2 == 0) ? 1.0 : -1.0);
  const double a = (g.delta * p - y) / (k + 1) - 1.0;
  r.residual = std::abs(a * g.t + lead) / std::abs(lead);
  return r;
}

struct MaxResult {
  double p = 0.0;
  double outage = 0.0;
};

/// argmax over p in [0, 1] of P{p X_1 + (1 - p) X_2 <= x}, reported with
/// p <= 1/2. Grid scan, then golden-section refinement of an interior peak.
inline MaxResult find_max_t2(double x, int grid_size = 10000) {
  if (!(x > 0.0)) throw DomainError("find_max_t2 needs x > 0");
  if (grid_size < 1000) throw DomainError("find_max_t2 needs grid_size >= 1000");
  auto f = [x](double p) {
    std::vector<Atom> atoms;
    if (p > 0.0) atoms.push_back({p, 1});
    if (p < 1.0) atoms.push_back({1.0 - p, 1});
    return cdf(WeightedExpSum(std::move(atoms)), x);
  };
  int best_i = 0;
  double best = f(0.0);
  for (int i = 1; i <= grid_size; ++i) {
    const double v = f(static_cast<double>(i) / grid_size);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double p = static_cast<double>(best_i) / grid_size;
  if (best_i > 0 && best_i < grid_size) {
    double a = static_cast<double>(best_i - 1) / grid_size;
    double b = static_cast<double>(best_i + 1) / grid_size;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-12) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = f(d);
      }
    }
    const double refined = 0.5 * (a + b);
    const double fr = f(refined);
    if (fr >= best) {
      p = refined;
      best = fr;
    }
  }
  if (p > 0.5) p = 1.0 - p;
  return {p, best};
}

}  // namespace outage

#endif  // OUTAGE_PROOF_LAB_HPP
