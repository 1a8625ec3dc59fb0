#include "outage/allocator.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace outage {
namespace {

// Root of e^x = 1 + 2x on (0.1, 10) by plain bisection.
double k1_crossing_oracle() {
  double lo = 0.1, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::exp(mid) - 1.0 - 2.0 * mid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int brute_force_k(double x, int t) {
  int best = 1;
  for (int k = 2; k <= t; ++k) {
    if (strictly_better(erlang_outage(k, x), erlang_outage(best, x))) best = k;
  }
  return best;
}

TEST(OptimalK, SmallAndLargeThresholds) {
  EXPECT_EQ(optimal_k(0.1, 5).k, 5);
  EXPECT_EQ(optimal_k(5.0, 5).k, 1);
  const auto a = optimal_k(0.1, 5);
  EXPECT_EQ(a.q.dim(), 5u);
  EXPECT_DOUBLE_EQ(a.q[4], 0.2);
  EXPECT_EQ(a.outage, erlang_outage(5, 0.1));
}

TEST(OptimalK, TieAtCrossingGoesToSmallerK) {
  const double x1 = crossing(1).x;
  EXPECT_EQ(optimal_k(x1, 2).k, 1);
  // Rounded to six decimals the threshold sits just below the tab, where
  // the two-antenna allocation is strictly better (by ~2.6e-8).
  EXPECT_EQ(optimal_k(1.256431, 2).k, 2);
}

TEST(OptimalK, NonPositiveThresholdIsDegenerate) {
  for (double x : {-1.0, 0.0}) {
    const auto a = optimal_k(x, 4);
    EXPECT_TRUE(a.degenerate);
    EXPECT_EQ(a.k, 4);
    EXPECT_EQ(a.outage, 0.0);
  }
}

TEST(OptimalK, MinimizesOverAllK) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ux(0.01, 6.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = ux(rng);
    const int t = 1 + trial % 12;
    const auto a = optimal_k(x, t);
    EXPECT_EQ(a.k, brute_force_k(x, t));
    for (int k = 1; k <= t; ++k) EXPECT_LE(a.outage, erlang_outage(k, x));
  }
}

TEST(Crossing, FirstTab) {
  const auto c = crossing(1);
  const double oracle = k1_crossing_oracle();
  EXPECT_NEAR(c.x, oracle, 1e-12);
  EXPECT_NEAR(c.x, 1.256431, 1e-5);
  EXPECT_NEAR(c.outage, 1.0 - std::exp(-oracle), 1e-12);
  EXPECT_NEAR(c.outage, 0.715332, 1e-5);
}

TEST(Crossing, TieHoldsToMachinePrecision) {
  for (int k : {1, 2, 5, 17, 39, 64}) {
    const auto c = crossing(k);
    EXPECT_NEAR(erlang_outage(k, c.x), erlang_outage(k + 1, c.x), 1e-12);
  }
}

TEST(Crossing, SecondTabBelowFirst) {
  const auto c1 = crossing(1);
  const auto c2 = crossing(2);
  EXPECT_LT(c2.x, c1.x);
  EXPECT_LT(c2.outage, c1.outage);
}

TEST(Crossing, UniqueSignChangeAndDecreasingOutage) {
  double prev_outage = 1.0;
  double prev_x = 100.0;
  for (int k = 1; k <= 64; ++k) {
    int changes = 0;
    double prev = erlang_outage(k, 1e-3) - erlang_outage(k + 1, 1e-3);
    for (int i = 1; i <= 4000; ++i) {
      const double x = 20.0 * i / 4000.0;
      const double g = detail::erlang_gap(k, x);
      if (g != 0.0 && prev != 0.0 && (g > 0.0) != (prev > 0.0)) ++changes;
      if (g != 0.0) prev = g;
    }
    EXPECT_EQ(changes, 1) << "k = " << k;
    const auto c = crossing(k);
    EXPECT_LT(c.outage, prev_outage);
    EXPECT_GT(c.outage, 0.5);
    EXPECT_LT(c.x, prev_x);
    prev_outage = c.outage;
    prev_x = c.x;
  }
}

TEST(CrossingTable, TwoAntennas) {
  const auto table = figure1_table(2);
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_NEAR(table.rows[0].outage, 0.715332, 1e-5);
}

TEST(CrossingTable, FortyAntennas) {
  const auto table = figure1_table(40);
  ASSERT_EQ(table.rows.size(), 39u);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    EXPECT_LT(table.rows[i].outage, table.rows[i - 1].outage);
  }
  EXPECT_GT(table.rows.back().outage, 0.5);
  EXPECT_LT(table.rows.back().outage, 0.55);
}

TEST(CrossingTable, TabsDoNotDependOnT) {
  const auto small = figure1_table(3);
  const auto large = figure1_table(40);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(small.rows[i].x, large.rows[i].x);
    EXPECT_EQ(small.rows[i].outage, large.rows[i].outage);
  }
}

TEST(CrossingTable, ThreadCountDoesNotChangeTable) {
  const auto a = figure1_table(25, 1);
  const auto b = figure1_table(25, 7);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].x, b.rows[i].x);
  }
}

TEST(CrossingTable, StepTableMatchesOptimalK) {
  std::mt19937_64 rng(32);
  for (int t : {2, 5, 12, 40}) {
    const auto table = figure1_table(t);
    std::uniform_real_distribution<double> ux(0.01, 4.0);
    for (int i = 0; i < 1000; ++i) {
      const double x = ux(rng);
      EXPECT_EQ(table.k_at(x), optimal_k(x, t).k) << "t=" << t << " x=" << x;
    }
    for (const auto& s : figure1_steps(table, 100)) {
      EXPECT_EQ(s.k_opt, table.k_at(s.x));
    }
  }
}

TEST(RateToThreshold, Values) {
  EXPECT_EQ(rate_to_threshold(0.0, 3.0), 0.0);
  EXPECT_NEAR(rate_to_threshold(std::numbers::ln2, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(rate_to_threshold(1.0, 2.0), (std::numbers::e - 1.0) / 2.0, 1e-15);
  EXPECT_THROW(rate_to_threshold(1.0, 0.0), DomainError);
  EXPECT_THROW(rate_to_threshold(-1.0, 1.0), DomainError);
}

TEST(Gaussian, ClosedFormCases) {
  EXPECT_EQ(gaussian_minimizer(0.0, 7).outage, 0.5);
  const auto pos = gaussian_minimizer(1.0, 3);
  EXPECT_EQ(pos.q.vector(), (std::vector<double>{1.0, 0.0, 0.0}));
  const auto neg = gaussian_minimizer(-1.0, 4);
  EXPECT_DOUBLE_EQ(neg.q[0], 0.25);
  // Phi(-2) from the erfc series.
  EXPECT_NEAR(neg.outage, 0.022750131948179195, 1e-15);
}

TEST(Gaussian, GridSearchOverSimplex) {
  for (int t : {2, 3}) {
    const int g = 60;
    for (double x : {1.0, -1.0, 0.0}) {
      double best = 2.0;
      std::vector<double> arg;
      std::vector<int> m(static_cast<std::size_t>(t), 0);
      // Enumerate the lattice {m / g : sum m = g}.
      auto visit = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == m.size()) {
          m[i] = left;
          std::vector<double> q(m.size());
          for (std::size_t j = 0; j < m.size(); ++j) q[j] = double(m[j]) / g;
          const double v = gaussian_outage(Weights(q), x);
          if (x == 0.0) {
            EXPECT_EQ(v, 0.5);
          }
          if (v < best) {
            best = v;
            arg = q;
          }
          return;
        }
        for (int a = 0; a <= left; ++a) {
          m[i] = a;
          self(self, i + 1, left - a);
        }
      };
      visit(visit, 0, g);
      const auto claim = gaussian_minimizer(x, t);
      if (x > 0.0) {
        EXPECT_NEAR(*std::max_element(arg.begin(), arg.end()), 1.0, 1e-15);
      } else if (x < 0.0) {
        for (double v : arg) EXPECT_NEAR(v, 1.0 / t, 1.0 / g);
      }
      EXPECT_NEAR(best, claim.outage, 1e-12);
    }
  }
}

}  // namespace
}  // namespace outage
