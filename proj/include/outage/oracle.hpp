#ifndef OUTAGE_ORACLE_HPP
#define OUTAGE_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "outage/allocator.hpp"
#include "outage/detail/parallel.hpp"
#include "outage/detail/special.hpp"
#include "outage/error.hpp"
#include "outage/hypoexp.hpp"
#include "outage/weights.hpp"

namespace outage {

namespace detail {

inline std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform on (0, 1] from (seed, counter); no generator state.
inline double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = splitmix(key + splitmix(counter));
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace detail

struct McEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;  // sqrt(p_hat (1 - p_hat) / n)
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

/// Fraction of n simulated <q, X> falling at or below x. Sample i uses the
/// counters i*t .. i*t + t - 1, so the estimate does not depend on threads.
inline McEstimate monte_carlo(const Weights& q, double x, std::int64_t n,
                              std::uint64_t seed, unsigned threads = 0) {
  if (n < 10000) throw DomainError("monte_carlo needs n >= 10000");
  const auto t = static_cast<std::uint64_t>(q.dim());
  const std::uint64_t key = detail::splitmix(seed ^ 0x6a09e667f3bcc909ULL);
  const auto ranges = detail::split_range(static_cast<std::size_t>(n), 256);
  std::vector<std::int64_t> hits(ranges.size(), 0);
  const std::vector<double> w = q.vector();
  detail::parallel_tasks(ranges.size(), threads, [&](std::size_t c) {
    std::int64_t h = 0;
    for (std::size_t i = ranges[c].first; i < ranges[c].second; ++i) {
      double s = 0.0;
      for (std::uint64_t j = 0; j < t; ++j) {
        if (w[j] == 0.0) continue;
        s -= w[j] * std::log(detail::counter_uniform(key, i * t + j));
      }
      if (s <= x) ++h;
    }
    hits[c] = h;
  });
  std::int64_t total = 0;
  for (std::int64_t h : hits) total += h;
  McEstimate r;
  r.n = n;
  r.seed = seed;
  r.p_hat = static_cast<double>(total) / static_cast<double>(n);
  r.std_error = std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(n));
  return r;
}

/// CDF by inverting the characteristic function psi(w) = prod (1 + i w q)^-m:
///   P = (1/pi) int_0^inf Re[psi(w) (e^{iwx} - 1)/(iw)] dw.
/// The "-1" half integrates to exactly 1/2 (P{S <= 0} = 0), leaving
///   P = 1/2 + (1/pi) int_0^inf Im[psi(w) e^{iwx}] / w dw,
/// truncated at Omega where the remaining tail is provably below 1e-10.
inline double fourier_cdf(const WeightedExpSum& d, double x) {
  if (!(x > 0.0)) throw DomainError("fourier_cdf needs x > 0");
  const int total = d.total_multiplicity();
  if (total < 2) throw PreconditionError("fourier_cdf needs total multiplicity >= 2");

  // With g = psi/w, |psi| <= C w^-M (C = prod q^-m) and |g'| <= (M+1) C w^{-M-2};
  // one integration by parts bounds the tail past Omega by 2 C Omega^{-M-1} / x.
  constexpr double kTail = 1e-10;
  double log_c = 0.0;
  for (const Atom& a : d.atoms()) log_c -= a.multiplicity * std::log(a.weight);
  const double omega_max = std::exp(
      (std::log(2.0 / (std::numbers::pi * x * kTail)) + log_c) / (total + 1));

  const double drift = x - d.mean();
  auto integrand = [&](double w) {
    if (w < 1e-10) return drift;  // limit at the origin
    std::complex<double> psi(1.0, 0.0);
    for (const Atom& a : d.atoms()) {
      const std::complex<double> f = 1.0 / std::complex<double>(1.0, w * a.weight);
      for (int r = 0; r < a.multiplicity; ++r) psi *= f;
    }
    return (psi * std::polar(1.0, w * x)).imag() / w;
  };

  // Panels no wider than half an oscillation of e^{iwx}; near the origin
  // also no wider than the distance to the nearest pole.
  const double osc = std::numbers::pi / x;
  const double pole = 1.0 / d.max_weight();
  constexpr std::int64_t kMaxPanels = 20'000'000;
  std::int64_t panels = 0;
  double a = 0.0, err_total = 0.0;
  detail::CompensatedSum sum;
  while (a < omega_max) {
    const double h = std::min(osc, std::max(pole, 0.5 * a));
    const double b = std::min(omega_max, a + h);
    double err = 0.0;
    sum.add(boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        integrand, a, b, 10, 1e-12, &err));
    err_total += err;
    a = b;
    if (++panels > kMaxPanels) {
      throw AccuracyError("fourier_cdf: too many panels to reach the tail bound");
    }
  }
  if (err_total > 1e-9) {
    throw AccuracyError("fourier_cdf: quadrature error estimate too large");
  }
  return 0.5 + sum.value() / std::numbers::pi;
}

struct GridMinimizer {
  Weights q_best;
  double outage_best = 0.0;
  int grid_resolution = 0;
  bool matches_conjecture = false;
  int predicted_k = 0;
  std::int64_t evaluated = 0;
};

namespace detail {

inline double lattice_outage(const std::vector<int>& m, int g, double x) {
  std::vector<Atom> atoms;
  for (int v : m) {
    if (v > 0) atoms.push_back({static_cast<double>(v) / g, 1});
  }
  return cdf(WeightedExpSum(std::move(atoms)), x);
}

// Does sorted(q) sit within one lattice step of (1/k, ..., 1/k, 0, ..., 0)?
inline bool near_uniform_point(std::vector<double> q, int k, int g) {
  std::sort(q.begin(), q.end(), std::greater<>());
  const double tol = 1.0 / g + 1e-12;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double target = static_cast<int>(i) < k ? 1.0 / k : 0.0;
    if (std::abs(q[i] - target) > tol) return false;
  }
  return true;
}

}  // namespace detail

/// Exhaustive argmin of the outage over {m/g : sum m = g} (or sum m <= g
/// with include_interior). Ties keep the lexicographically first point.
inline GridMinimizer brute_force_min(int t, double x, int g,
                                     bool include_interior = false,
                                     unsigned threads = 0) {
  if (t > 4) {
    throw DomainError(
        "brute_force_min is limited to t <= 4; use kt_check at the candidate "
        "points for larger t");
  }
  if (t < 2) throw DomainError("brute_force_min needs t >= 2");
  if (!(x > 0.0)) throw DomainError("brute_force_min needs x > 0");
  if (g < 50) throw DomainError("brute_force_min needs grid_resolution >= 50");

  struct Local {
    double value = std::numeric_limits<double>::infinity();
    std::vector<int> arg;
    std::int64_t count = 0;
  };
  // One task per value of the first coordinate; inside, lexicographic order.
  std::vector<Local> locals(static_cast<std::size_t>(g) + 1);
  detail::parallel_tasks(locals.size(), threads, [&](std::size_t first) {
    Local& loc = locals[first];
    std::vector<int> m(static_cast<std::size_t>(t), 0);
    m[0] = static_cast<int>(first);
    auto visit = [&](auto&& self, std::size_t i, int left) -> void {
      if (i + 1 == m.size()) {
        const int lo = include_interior ? 0 : left;
        for (int v = lo; v <= left; ++v) {
          m[i] = v;
          if (std::all_of(m.begin(), m.end(), [](int z) { return z == 0; })) continue;
          const double val = detail::lattice_outage(m, g, x);
          ++loc.count;
          if (val < loc.value) {
            loc.value = val;
            loc.arg = m;
          }
        }
        return;
      }
      for (int v = 0; v <= left; ++v) {
        m[i] = v;
        self(self, i + 1, left - v);
      }
    };
    visit(visit, 1, g - static_cast<int>(first));
  });

  GridMinimizer r;
  r.grid_resolution = g;
  const Local* best = nullptr;
  for (const Local& loc : locals) {
    r.evaluated += loc.count;
    if (loc.count > 0 && (best == nullptr || loc.value < best->value)) best = &loc;
  }
  std::vector<double> q(best->arg.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = static_cast<double>(best->arg[i]) / g;
  }
  r.q_best = Weights(q);
  r.outage_best = best->value;
  r.predicted_k = optimal_k(x, t).k;
  r.matches_conjecture = detail::near_uniform_point(q, r.predicted_k, g);
  return r;
}

}  // namespace outage

#endif  // OUTAGE_ORACLE_HPP
