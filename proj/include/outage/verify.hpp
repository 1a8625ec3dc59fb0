#ifndef OUTAGE_VERIFY_HPP
#define OUTAGE_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "outage/allocator.hpp"
#include "outage/calculus.hpp"
#include "outage/hypoexp.hpp"
#include "outage/oracle.hpp"
#include "outage/proof_lab.hpp"

namespace outage::verify {

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct Options {
  int t = 2;
  int grid = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

inline bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

namespace detail {

inline Check at_most(std::string name, double measured, double threshold) {
  return {std::move(name), measured <= threshold, measured, threshold};
}

inline Weights random_positive_simplex(std::mt19937_64& rng, std::size_t t) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(t);
  double s = 0.0;
  for (double& z : v) {
    z = e(rng) + 0.02;
    s += z;
  }
  for (double& z : v) z /= s;
  double total = 0.0;
  for (double z : v) total += z;
  if (total > 1.0) v.back() -= total - 1.0;
  return Weights(std::move(v));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// Raw outage of any non-negative vector; used to step off the simplex.
inline double raw_outage(const std::vector<double>& q, double x) {
  std::vector<Atom> atoms;
  for (double v : q) {
    if (v > 0.0) atoms.push_back({v, 1});
  }
  return cdf(WeightedExpSum(std::move(atoms)), x);
}

// Sign changes of the density derivative on n points over (0, mean + 10 sd].
inline int derivative_sign_changes(const WeightedExpSum& d, int n) {
  const double end = d.mean() + 10.0 * std::sqrt(d.variance());
  std::vector<double> v(static_cast<std::size_t>(n));
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = density_derivative(d, end * (i + 1) / n, 1);
    peak = std::max(peak, std::abs(v[static_cast<std::size_t>(i)]));
  }
  int changes = 0, last = 0;
  for (double z : v) {
    if (std::abs(z) <= 1e-13 * peak) continue;
    const int s = z > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace detail

/// Gradient, two-weight identity, unimodality and KT at the uniform points.
inline std::vector<Check> lemmas(const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> ut(1, 6);
  std::uniform_int_distribution<int> ut2(2, 6);
  std::uniform_real_distribution<double> ux(0.05, 3.0);
  std::uniform_real_distribution<double> uw(0.0, 1.0);
  std::vector<Check> out;

  double worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Weights q = detail::random_positive_simplex(rng, static_cast<std::size_t>(ut(rng)));
    const double x = ux(rng);
    const auto g = outage_gradient(q, x);
    for (std::size_t k = 0; k < q.dim(); ++k) {
      constexpr double h = 1e-6;
      auto plus = q.vector(), minus = q.vector();
      plus[k] += h;
      minus[k] -= h;
      const double fd =
          (detail::raw_outage(plus, x) - detail::raw_outage(minus, x)) / (2 * h);
      worst_grad = std::max(worst_grad, detail::rel_err(g[k], fd));
    }
  }
  out.push_back(detail::at_most("gradient.vs_finite_difference", worst_grad, 1e-5));

  double worst_l2 = 0.0;
  std::uniform_int_distribution<int> natoms(1, 4), mult(1, 3);
  std::uniform_real_distribution<double> wlaw(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Atom> atoms;
    for (int i = natoms(rng); i > 0; --i) atoms.push_back({wlaw(rng), mult(rng)});
    const WeightedExpSum base(atoms);
    worst_l2 = std::max(worst_l2, lemma2_residual(base, uw(rng), uw(rng), ux(rng)));
  }
  out.push_back(detail::at_most("identity.two_weight_residual", worst_l2, 1e-10));

  int not_unimodal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Weights q = detail::random_positive_simplex(rng, static_cast<std::size_t>(ut2(rng)));
    if (detail::derivative_sign_changes(from_weights(q), 10000) != 1) ++not_unimodal;
  }
  out.push_back(detail::at_most("density.unimodal", not_unimodal, 0));

  double worst_kt = 0.0;
  for (int t = 1; t <= 6; ++t) {
    for (int k = 1; k <= t; ++k) {
      for (double x : {0.3, 0.9, 1.2, 2.5}) {
        const auto r = kt_check(Weights::uniform(static_cast<std::size_t>(k),
                                                 static_cast<std::size_t>(t)),
                                x);
        worst_kt = std::max(worst_kt, r.stationarity_residual);
      }
    }
  }
  out.push_back(detail::at_most("kt.uniform_point_stationarity", worst_kt, 1e-12));
  return out;
}

inline std::vector<double> scripted_thresholds(int t) {
  if (t == 2) return {0.2, 0.5, 0.8, 1.1, 1.2564, 1.5, 2.5};
  return {0.5, 1.0, 1.5};
}

/// Brute-force minimizer against the predicted uniform-over-k point, the
/// crossing tabs, and a Monte Carlo spot check of the outage itself.
inline std::vector<Check> conjecture(const Options& opt) {
  std::vector<Check> out;
  for (double x : scripted_thresholds(opt.t)) {
    const GridMinimizer m = brute_force_min(opt.t, x, opt.grid, false, opt.threads);
    auto sorted = m.q_best.vector();
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double dev = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double target = static_cast<int>(i) < m.predicted_k ? 1.0 / m.predicted_k : 0.0;
      dev = std::max(dev, std::abs(sorted[i] - target));
    }
    std::ostringstream name;
    name << "conjecture.t" << opt.t << ".x=" << x;
    out.push_back({name.str(), m.matches_conjecture, dev, 1.0 / opt.grid});
  }
  if (opt.t == 2) {
    const int g = std::min(opt.grid, 500);
    int mismatches = 0;
    for (double x : scripted_thresholds(2)) {
      const auto eq = brute_force_min(2, x, g, false, opt.threads);
      const auto ineq = brute_force_min(2, x, g, true, opt.threads);
      if (eq.q_best.vector() != ineq.q_best.vector()) ++mismatches;
    }
    out.push_back(detail::at_most("conjecture.inequality_simplex_same_minimizer",
                                  mismatches, 0));
  }

  const CrossingTable table = figure1_table(std::max(opt.t, 40), opt.threads);
  int bad_tabs = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!(table.rows[i].outage > 0.5)) ++bad_tabs;
    if (i > 0 && !(table.rows[i].outage < table.rows[i - 1].outage)) ++bad_tabs;
  }
  out.push_back(detail::at_most("crossing.tabs_decreasing_above_half", bad_tabs, 0));

  const Weights u = Weights::uniform(static_cast<std::size_t>(opt.t),
                                     static_cast<std::size_t>(opt.t));
  const McEstimate mc = monte_carlo(u, 1.0, 1'000'000, opt.seed, opt.threads);
  const double z = std::abs(mc.p_hat - outage_probability(u, 1.0)) / mc.std_error;
  out.push_back(detail::at_most("oracle.monte_carlo_z_score", z, 4.0));
  return out;
}

/// Two-value family scan, boundary signs, curvature flip and the x* apparatus.
inline std::vector<Check> prooflab(const Options& opt) {
  std::vector<Check> out;
  int most = 0;
  for (int k : {1, 2, 3, 5}) {
    for (double x : {0.3, 0.7, 0.9, 1.1, 1.4, 2.0}) {
      most = std::max(most, scan(TwoValueFamily{k, x}, 1000).extrema_count);
    }
  }
  out.push_back(detail::at_most("prooflab.scan_extrema_count", most, 1));

  int sign_errors = 0, curvature_errors = 0;
  for (int k : {1, 2, 5}) {
    if (scan(TwoValueFamily{k, 1.0 - 1e-3}, 100).sign_at_zero >= 0) ++sign_errors;
    if (scan(TwoValueFamily{k, 1.0 + 1e-3}, 100).sign_at_zero < 0) ++sign_errors;
    const double flip = (k + 2.0) / (k + 1.0);
    if (two_value_curvature_fd(TwoValueFamily{k, flip - 1e-3}) <= 0.0) ++curvature_errors;
    if (two_value_curvature_fd(TwoValueFamily{k, flip + 1e-3}) >= 0.0) ++curvature_errors;
  }
  out.push_back(detail::at_most("prooflab.boundary_sign_flips_at_one", sign_errors, 0));
  out.push_back(detail::at_most("prooflab.curvature_flips_at_shifted_mode",
                                curvature_errors, 0));

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uf(0.02, 0.98), ux(0.2, 3.0);
  std::uniform_int_distribution<int> uk(1, 8);
  double worst_gk = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = uk(rng);
    const double p = uf(rng) / (k + 1);
    const double x = ux(rng);
    const WeightedExpSum law({{p, 2}, {(1.0 - p) / k, k + 1}});
    const double ref = density_derivative(law, x, 1);
    worst_gk = std::max(worst_gk, std::abs(gk_eval(p, k, x).value - ref) /
                                      std::max(std::abs(ref), 1e-300));
  }
  out.push_back(detail::at_most("prooflab.gk_eval_vs_density_derivative", worst_gk, 1e-8));

  int xstar_violations = 0;
  double worst_residual = 0.0;
  for (int k : {1, 2, 5, 10}) {
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
      const XStarResult r = xstar(i / 51.0 / (k + 1), k);
      if (!(r.xstar >= 1.0) || !(r.xstar > r.lower_bound) || !(r.xstar > prev)) {
        ++xstar_violations;
      }
      worst_residual = std::max(worst_residual, r.residual);
      prev = r.xstar;
    }
  }
  out.push_back(detail::at_most("prooflab.xstar_bound_and_monotone", xstar_violations, 0));
  out.push_back(detail::at_most("prooflab.xstar_relation_residual", worst_residual, 1e-9));
  return out;
}

inline std::vector<Check> run_suite(const std::string& suite, const Options& opt) {
  if (suite == "lemmas") return lemmas(opt);
  if (suite == "conjecture") return conjecture(opt);
  if (suite == "prooflab") return prooflab(opt);
  if (suite == "all") {
    auto out = lemmas(opt);
    for (auto&& c : conjecture(opt)) out.push_back(std::move(c));
    for (auto&& c : prooflab(opt)) out.push_back(std::move(c));
    return out;
  }
  throw DomainError("unknown suite '" + suite + "'");
}

}  // namespace outage::verify

#endif  // OUTAGE_VERIFY_HPP
