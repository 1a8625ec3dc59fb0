#include "outage/calculus.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "outage/allocator.hpp"
#include "test_support.hpp"

namespace outage {
namespace {

using testing::relative_error;

// Outage for an arbitrary non-negative vector (no simplex check), used to
// build finite differences that step outside the simplex.
double raw_outage(const std::vector<double>& q, double x) {
  std::vector<Atom> atoms;
  for (double v : q) {
    if (v > 0.0) atoms.push_back({v, 1});
  }
  return cdf(WeightedExpSum(std::move(atoms)), x);
}

double fd_partial(const Weights& q, std::size_t k, double x, double h) {
  auto plus = q.vector();
  auto minus = q.vector();
  plus[k] += h;
  minus[k] -= h;
  return (raw_outage(plus, x) - raw_outage(minus, x)) / (2.0 * h);
}

TEST(OutageGradient, SingleWeight) {
  const auto g = outage_gradient(Weights{1.0}, 1.0);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_NEAR(g[0], -std::exp(-1.0), 1e-15);
}

TEST(OutageGradient, ExchangeableCoordinatesAreEqual) {
  const auto g = outage_gradient(Weights{0.5, 0.5}, 0.8);
  EXPECT_EQ(g[0], g[1]);
}

TEST(OutageGradient, MatchesFiniteDifferences) {
  const Weights q{0.6, 0.4};
  const auto g = outage_gradient(q, 1.0);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_LT(relative_error(g[k], fd_partial(q, k, 1.0, 1e-6)), 1e-5);
  }
}

TEST(OutageGradient, ZeroComponentIsDomainError) {
  EXPECT_THROW(outage_gradient(Weights{0.5, 0.0, 0.5}, 1.0), DomainError);
  // The one-sided partial is still available for KT checks.
  EXPECT_NEAR(outage_partial(Weights{0.5, 0.0, 0.5}, 1, 1.0),
              -density(WeightedExpSum({{0.5, 2}}), 1.0), 1e-15);
}

TEST(OutageGradient, RandomFiniteDifferenceAgreementAndSign) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> ut(1, 6);
  std::uniform_real_distribution<double> ux(0.05, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = testing::random_simplex_point(rng, ut(rng));
    const double x = ux(rng);
    const auto g = outage_gradient(q, x);
    for (std::size_t k = 0; k < q.dim(); ++k) {
      EXPECT_LE(g[k], 0.0);
      worst = std::max(worst, relative_error(g[k], fd_partial(q, k, x, 1e-6)));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(TwoWeightIdentity, EqualWeightsVanish) {
  const WeightedExpSum base({{0.2, 1}, {0.3, 1}});
  EXPECT_EQ(lemma2_residual(base, 0.5, 0.5, 1.0), 0.0);
}

TEST(TwoWeightIdentity, ZeroFirstWeight) {
  const WeightedExpSum base({{0.3, 1}});
  EXPECT_LE(lemma2_residual(base, 0.0, 0.5, 1.0), 1e-10);
  // Y = 0 as well: point mass against a single exponential.
  EXPECT_LE(lemma2_residual(std::nullopt, 0.0, 0.5, 1.0), 1e-10);
  EXPECT_THROW(lemma2_residual(std::nullopt, 0.0, 0.0, 1.0), PreconditionError);
}

TEST(TwoWeightIdentity, GenericConfiguration) {
  const WeightedExpSum base({{0.2, 1}, {0.3, 1}});
  EXPECT_LE(lemma2_residual(base, 0.1, 0.4, 2.0), 1e-10);
}

TEST(TwoWeightIdentity, RandomConfigurations) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> uw(0.0, 1.0);
  std::uniform_real_distribution<double> ux(0.05, 4.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto base = testing::random_law(rng, 6);
    const double r = lemma2_residual(base, uw(rng), uw(rng), ux(rng));
    worst = std::max(worst, r);
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(TwoWeightIdentity, ChainIdentity) {
  // f_{Y+q1X1} - f_{Y+q1X1+q3X3} = q3 f'_{Y+q1X1+q3X3}
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uw(0.05, 0.8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto y = testing::random_law(rng, 4);
    const auto yq1 = y.augmented({uw(rng)});
    EXPECT_LE(lemma2_residual(yq1, 0.0, uw(rng), 1.3), 1e-10);
  }
}

TEST(KtCheck, BarycentreIsStationary) {
  const auto r = kt_check(Weights::uniform(3, 3), 0.5);
  EXPECT_TRUE(r.satisfied);
  EXPECT_EQ(r.active_set.size(), 3u);
  EXPECT_EQ(r.stationarity_residual, 0.0);
}

TEST(KtCheck, BothUniformPointsAtTheirCrossing) {
  const double x = crossing(2).x;
  const auto two = kt_check(Weights{0.5, 0.5, 0.0}, x);
  EXPECT_TRUE(two.satisfied) << two.inactive_violation;
  const auto three = kt_check(Weights::uniform(3, 3), x);
  EXPECT_TRUE(three.satisfied);
  // Same outage at the tab.
  EXPECT_NEAR(outage_probability(Weights{0.5, 0.5, 0.0}, x),
              outage_probability(Weights::uniform(3, 3), x), 1e-12);
}

TEST(KtCheck, GenericPointFails) {
  const auto r = kt_check(Weights{0.6, 0.4, 0.0}, 0.7);
  EXPECT_FALSE(r.satisfied);
  EXPECT_GT(r.stationarity_residual, 1e-4);
}

TEST(KtCheck, RequiresEqualitySimplex) {
  EXPECT_THROW(kt_check(Weights{0.3, 0.3}, 1.0), PreconditionError);
}

TEST(KtCheck, UniformPointsHaveEqualActivePartials) {
  for (int t = 1; t <= 6; ++t) {
    for (int k = 1; k <= t; ++k) {
      for (double x : {0.3, 0.9, 1.2, 2.5}) {
        const auto r = kt_check(
            Weights::uniform(static_cast<std::size_t>(k),
                             static_cast<std::size_t>(t)),
            x);
        for (std::size_t i : r.active_set) {
          EXPECT_EQ(r.partials[i], r.partials[0]);
        }
        EXPECT_LE(r.stationarity_residual, 1e-15);
      }
    }
  }
}

TEST(SymmetricPerturbation, VanishesAtModeOfAugmentedSum) {
  // (1/2,1/2) augmented by two halves: 0.5 * Erlang(4), mode 1.5.
  EXPECT_NEAR(symmetric_perturbation_second_derivative(Weights{0.5, 0.5}, 0, 1, 1.5),
              0.0, 1e-14);
  EXPECT_GT(symmetric_perturbation_second_derivative(Weights{0.5, 0.5}, 0, 1, 0.3),
            0.0);
}

TEST(SymmetricPerturbation, MatchesSecondDifference) {
  for (const auto& [q, x] :
       std::vector<std::pair<Weights, double>>{{Weights::uniform(3, 3), 0.9},
                                               {Weights{0.25, 0.25, 0.5}, 1.4},
                                               {Weights{0.5, 0.5}, 0.7}}) {
    const double h = 1e-4;
    auto at = [&](double d) {
      auto v = q.vector();
      v[0] += d;
      v[1] -= d;
      return raw_outage(v, x);
    };
    const double fd = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
    const double analytic = symmetric_perturbation_second_derivative(q, 0, 1, x);
    EXPECT_LT(relative_error(analytic, fd), 1e-4) << analytic << " vs " << fd;
  }
}

TEST(SymmetricPerturbation, Preconditions) {
  EXPECT_THROW(symmetric_perturbation_second_derivative(Weights{0.6, 0.4}, 0, 1, 1.0),
               PreconditionError);
  EXPECT_THROW(symmetric_perturbation_second_derivative(Weights{0.5, 0.5}, 0, 0, 1.0),
               PreconditionError);
}

}  // namespace
}  // namespace outage
