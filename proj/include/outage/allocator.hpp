#ifndef OUTAGE_ALLOCATOR_HPP
#define OUTAGE_ALLOCATOR_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "outage/detail/parallel.hpp"
#include "outage/detail/special.hpp"
#include "outage/error.hpp"
#include "outage/hypoexp.hpp"
#include "outage/weights.hpp"

namespace outage {

/// Optimal uniform-over-k allocation for one threshold.
struct Allocation {
  int k = 0;
  Weights q;
  double outage = 0.0;
  /// x <= 0: every allocation has outage 0, k = t by convention.
  bool degenerate = false;
};

/// Outage values within this relative distance are a tie (smaller k wins).
inline constexpr double kTieTolerance = 1e-12;

/// True when `candidate` beats `incumbent` by more than the tie tolerance.
inline bool strictly_better(double candidate, double incumbent) {
  return candidate < incumbent * (1.0 - kTieTolerance);
}

/// argmin over k in 1..t of erlang_outage(k, x).
inline Allocation optimal_k(double x, int t) {
  if (t < 1) throw DomainError("optimal_k needs t >= 1");
  const auto dim = static_cast<std::size_t>(t);
  if (x <= 0.0) {
    return {t, Weights::uniform(dim, dim), 0.0, true};
  }
  int best_k = 1;
  double best = erlang_outage(1, x);
  for (int k = 2; k <= t; ++k) {
    const double v = erlang_outage(k, x);
    if (strictly_better(v, best)) {
      best = v;
      best_k = k;
    }
  }
  return {best_k, Weights::uniform(static_cast<std::size_t>(best_k), dim), best,
          false};
}

/// A tab of the step function x -> optimal k: below x_k the allocation over
/// k + 1 antennas wins, above it the one over k.
struct Crossing {
  int k = 0;
  double x = 0.0;
  double outage = 0.0;
};

namespace detail {

// erlang_outage(k, x) - erlang_outage(k + 1, x), summing whichever tails are
// small so the sign is reliable far from the root.
inline double erlang_gap(int k, double x) {
  if (x < 1.0) {
    return regularized_gamma(k, k * x).lower -
           regularized_gamma(k + 1, (k + 1) * x).lower;
  }
  return regularized_gamma(k + 1, (k + 1) * x).upper -
         regularized_gamma(k, k * x).upper;
}

}  // namespace detail

/// Tie point of erlang_outage(k, .) and erlang_outage(k + 1, .) on x > 0.
inline Crossing crossing(int k) {
  if (k < 1) throw DomainError("crossing needs k >= 1");
  double lo = 1.0 / (k + 1);
  double hi = 10.0 + std::log(k + 1.0);

  // Uniqueness on the bracket, checked on a grid before refining.
  constexpr int kGrid = 400;
  int changes = 0;
  double prev = detail::erlang_gap(k, lo);
  double a = lo, b = hi;
  for (int i = 1; i <= kGrid; ++i) {
    const double xi = lo + (hi - lo) * i / kGrid;
    const double g = detail::erlang_gap(k, xi);
    if ((g > 0.0) != (prev > 0.0)) {
      ++changes;
      a = lo + (hi - lo) * (i - 1) / kGrid;
      b = xi;
    }
    prev = g;
  }
  if (changes != 1) {
    throw AccuracyError("crossing bracket does not isolate a single root");
  }
  lo = a;
  hi = b;
  const bool positive_left = detail::erlang_gap(k, lo) > 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((detail::erlang_gap(k, mid) > 0.0) == positive_left) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  return {k, x, erlang_outage(k, x)};
}

/// Step-plot data: the tabs for k = 1..t-1.
struct CrossingTable {
  int t = 0;
  std::vector<Crossing> rows;

  /// Optimal k read off the tabs (ties at a tab go to the smaller k).
  int k_at(double x) const {
    for (const Crossing& c : rows) {
      if (x >= c.x) return c.k;
    }
    return t;
  }
};

inline CrossingTable figure1_table(int t, unsigned threads = 0) {
  if (t < 2) throw DomainError("figure1_table needs t >= 2");
  CrossingTable table;
  table.t = t;
  table.rows.resize(static_cast<std::size_t>(t - 1));
  detail::parallel_tasks(table.rows.size(), threads, [&](std::size_t i) {
    table.rows[i] = crossing(static_cast<int>(i) + 1);
  });
  return table;
}

/// One sample of the step function outage -> optimal k.
struct StepSample {
  double x = 0.0;
  double outage = 0.0;
  int k_opt = 0;
};

/// Samples optimal_k on `n` evenly spaced thresholds spanning the tabs.
inline std::vector<StepSample> figure1_steps(const CrossingTable& table,
                                             int n = 200) {
  if (n < 2) throw DomainError("need at least two samples");
  const double lo = 0.9 * table.rows.back().x;
  const double hi = 1.1 * table.rows.front().x;
  std::vector<StepSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const Allocation a = optimal_k(x, table.t);
    out.push_back({x, a.outage, a.k});
  }
  return out;
}

/// Threshold for a rate R (nats) at signal-to-noise ratio snr.
inline double rate_to_threshold(double rate, double snr) {
  if (!(snr > 0.0)) throw DomainError("snr must be positive");
  if (rate < 0.0) throw DomainError("rate must be non-negative");
  return std::expm1(rate) / snr;
}

/// P{<q, G> <= x} for i.i.d. standard normal G.
inline double gaussian_outage(const Weights& q, double x) {
  double n2 = 0.0;
  for (double v : q.values()) n2 += v * v;
  if (n2 == 0.0) return x >= 0.0 ? 1.0 : 0.0;
  return detail::normal_cdf(x / std::sqrt(n2));
}

struct GaussianMinimizer {
  Weights q;
  double outage = 0.0;
};

/// Minimizer over the equality simplex for Gaussian X: a corner for x > 0,
/// the barycentre for x < 0. At x = 0 every q gives 1/2; the corner is
/// returned.
inline GaussianMinimizer gaussian_minimizer(double x, int t) {
  if (t < 1) throw DomainError("gaussian_minimizer needs t >= 1");
  const auto dim = static_cast<std::size_t>(t);
  if (x < 0.0) {
    return {Weights::uniform(dim, dim), detail::normal_cdf(x * std::sqrt(t))};
  }
  return {Weights::uniform(1, dim), x == 0.0 ? 0.5 : detail::normal_cdf(x)};
}

}  // namespace outage

#endif  // OUTAGE_ALLOCATOR_HPP
