// Copyright 2026 The ldpopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpopt/construct.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ldpopt/parallel.hpp"
#include "test_util.h"

namespace ldpopt {
namespace {

// Lower-bound constants fixed from a calibration sweep (observed minima
// 0.23 and 0.92 respectively).
constexpr double kMinimaxConstant = 1.0 / 8.0;
constexpr double kComparableConstant = 1.0 / 4.0;

double OutputHellinger(const Channel& t, const Distribution& p,
                       const Distribution& q) {
  return hellinger_sq(apply(t, p), apply(t, q));
}

template <typename Rng>
std::pair<double, double> RandomAdmissible(Rng& rng, double max_nu = 0.45) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double nu = max_nu * std::pow(10.0, -4.0 * u(rng));
  const double rho = 2 * nu * nu * std::pow(1.0 / (2 * nu), u(rng));
  return {std::min(rho, nu), nu};
}

// Pair whose likelihood ratios all lie in [1/2, 2].
template <typename Rng>
std::pair<Distribution, Distribution> ComparablePair(int k, double spread,
                                                     Rng& rng) {
  while (true) {
    const auto q = test::RandomDistribution(k, rng);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> w(k);
    for (int i = 0; i < k; ++i) w[i] = q[i] * std::exp(u(rng));
    Distribution p = Distribution::Normalized(std::move(w));
    const auto split = SplitComparable(p, q);
    if (split.below.size() + split.above.size() == static_cast<std::size_t>(k)) {
      return {std::move(p), q};
    }
  }
}

TEST(Bisect, FindsRoot) {
  const double root =
      BisectIncreasing([](double x) { return x * x * x - 2.0; }, 0.0, 2.0);
  EXPECT_NEAR(root, std::cbrt(2.0), 1e-12);
}

TEST(SdpiBinary, WorkedExample) {
  const auto p = Distribution::Bernoulli(0.5);
  const auto q = Distribution::Bernoulli(0.9);
  const auto r = sdpi_binary(p, q, std::log(3.0));
  EXPECT_NEAR(r.tv, 0.2, 1e-15);
  EXPECT_NEAR(r.tv_identity, 0.2, 1e-15);
  // Transformed parameters x -> (x (e - 1) + 1) / (e + 1) with e = 3.
  const double a = (0.5 * 2 + 1) / 4, b = (0.9 * 2 + 1) / 4;
  const double direct = std::pow(std::sqrt(a) - std::sqrt(b), 2) +
                        std::pow(std::sqrt(1 - a) - std::sqrt(1 - b), 2);
  EXPECT_NEAR(r.hellinger_sq, direct, 1e-15);
}

TEST(SdpiBinary, Limits) {
  const auto p = Distribution::Bernoulli(0.3);
  const auto q = Distribution::Bernoulli(0.6);
  EXPECT_NEAR(sdpi_binary(p, q, 0.0).hellinger_sq, 0.0, 1e-16);
  EXPECT_NEAR(sdpi_binary(p, q, 700.0).hellinger_sq, hellinger_sq(p, q),
              1e-15);
  EXPECT_THROW(sdpi_binary(Distribution({0.2, 0.3, 0.5}),
                           Distribution({0.2, 0.3, 0.5}), 1.0),
               std::invalid_argument);
}

TEST(SdpiBinary, TvIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const auto r = sdpi_binary(Distribution::Bernoulli(u(rng)),
                               Distribution::Bernoulli(u(rng)), 8 * u(rng));
    ASSERT_NEAR(r.tv, r.tv_identity, 1e-12);
  }
}

// n = 1 / d_h^2 after binary randomized response follows the three-branch
// law in (eps, TV, d_h^2) up to a factor 16.
TEST(SdpiBinary, ThreeBranchLaw) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double a = u(rng), b = u(rng);
    if (i % 3 == 0) b = a + (1 - a) * 1e-3 * u(rng);
    if (i % 3 == 1) a = 1e-4 * u(rng), b = 0.01 * u(rng);
    const auto p = Distribution::Bernoulli(a);
    const auto q = Distribution::Bernoulli(b);
    const double t = tv(p, q), h = hellinger_sq(p, q);
    if (t == 0.0) continue;
    for (double eps = 0.01; eps < 30.0; eps *= 1.3) {
      const double e = std::exp(eps);
      const double law = eps <= 1.0         ? 1.0 / (eps * eps * t * t)
                         : e <= h / (t * t) ? 1.0 / (e * t * t)
                                            : 1.0 / h;
      const double n_hat = 1.0 / sdpi_binary(p, q, eps).hellinger_sq;
      EXPECT_LE(n_hat / law, 16.0) << a << " " << b << " " << eps;
      EXPECT_GE(n_hat / law, 1.0 / 16.0) << a << " " << b << " " << eps;
    }
  }
}

TEST(WorstCasePair, Examples) {
  for (auto [rho, nu] : {std::pair{0.05, 0.1}, {1e-8, 1e-5}, {0.021, 0.1},
                         {0.1, 0.1}, {0.181, 0.3}}) {
    const auto pair = worst_case_pair(rho, nu);
    EXPECT_EQ(pair.p[0], 0.0);
    EXPECT_NEAR(tv(pair.p, pair.q), nu, 1e-12);
    EXPECT_NEAR(hellinger_sq(pair.p, pair.q), rho, 1e-9);
  }
}

TEST(WorstCasePair, RandomAdmissible) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto [rho, nu] = RandomAdmissible(rng);
    const auto pair = worst_case_pair(rho, nu);
    ASSERT_LE(std::abs(tv(pair.p, pair.q) - nu), 1e-12);
    ASSERT_LE(std::abs(hellinger_sq(pair.p, pair.q) - rho), 1e-9);
  }
}

TEST(WorstCasePair, RejectsOutsideRegion) {
  EXPECT_THROW(worst_case_pair(0.01, 0.1), std::invalid_argument);  // < 2nu^2
  EXPECT_THROW(worst_case_pair(0.2, 0.1), std::invalid_argument);   // > nu
  EXPECT_THROW(worst_case_pair(0.3, 0.6), std::invalid_argument);
  EXPECT_THROW(worst_case_pair(0.0, 0.0), std::invalid_argument);
}

TEST(BinaryPair, MatchesTargets) {
  for (auto [rho, nu] : {std::pair{1e-8, 1e-5}, {0.05, 0.1}, {0.012, 0.1}}) {
    const auto pair = binary_pair(rho, nu);
    EXPECT_EQ(pair.p.size(), 2u);
    EXPECT_NEAR(tv(pair.p, pair.q), nu, 1e-12);
    EXPECT_NEAR(hellinger_sq(pair.p, pair.q), rho, 1e-9 * std::max(rho, 1e-3));
  }
  EXPECT_THROW(binary_pair(0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(binary_pair(1e-5, 0.1), std::invalid_argument);
}

TEST(Minimax, BinaryInputIsRandomizedResponse) {
  const auto p = Distribution::Bernoulli(0.2);
  const auto q = Distribution::Bernoulli(0.7);
  for (double eps : {0.3, 1.0, 4.0}) {
    const auto t = minimax_channel(p, q, eps);
    EXPECT_NEAR(OutputHellinger(t, p, q), sdpi_binary(p, q, eps).hellinger_sq,
                1e-15);
  }
  EXPECT_THROW(minimax_channel(p, q, 0.0), std::invalid_argument);
}

TEST(Minimax, IsPrivateAndBinary) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + i % 8;
    const auto p = test::RandomDistributionWithTies(k, rng);
    const auto q = test::RandomDistribution(k, rng);
    const double eps = 0.2 + 0.3 * i;
    const auto t = minimax_channel(p, q, eps);
    EXPECT_EQ(t.output_size(), 2u);
    EXPECT_TRUE(membership(pure_ldp_family(k, 2, eps), t, 1e-12));
    EXPECT_LE(OutputHellinger(t, p, q),
              maximize_private(p, q, pure_ldp_family(k, 2, eps),
                               Objective::HellingerSq())
                      .value +
                  1e-12);
  }
}

// Lower bound: eps^2 TV^2 for eps <= 1, otherwise
// max(TV^2, (h / a) min(e^eps h / a, 1)) with a = log(1 / h).
TEST(Minimax, UpperBoundOnSampleComplexity) {
  std::mt19937_64 rng(5);
  auto check = [](const Distribution& p, const Distribution& q) {
    const double h = hellinger_sq(p, q), t = tv(p, q);
    if (!(h > 0.0 && h < 0.3)) return;
    const double a = std::log(1.0 / h);
    for (double eps = 0.05; eps < 25.0; eps *= 1.4) {
      const double e = std::exp(eps);
      const double bound =
          eps <= 1.0 ? eps * eps * t * t
                     : std::max(t * t, (h / a) * std::min(e * h / a, 1.0));
      EXPECT_GE(OutputHellinger(minimax_channel(p, q, eps), p, q),
                kMinimaxConstant * bound)
          << "eps=" << eps << " h=" << h << " tv=" << t;
    }
  };
  for (int i = 0; i < 30; ++i) {
    const auto [rho, nu] = RandomAdmissible(rng);
    const auto pair = worst_case_pair(rho, nu);
    check(pair.p, pair.q);
  }
  for (int i = 0; i < 30; ++i) {
    const auto [p, q] = ComparablePair(2 + i % 15, std::pow(10.0, -(i % 4)),
                                       rng);
    check(p, q);
    check(test::RandomDistribution(2 + i % 15, rng),
          test::RandomDistribution(2 + i % 15, rng));
  }
}

TEST(Minimax, HighPrivacyScalesWithTv) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const int k = 2 + i % 10;
    const auto p = test::RandomDistribution(k, rng);
    const auto q = test::RandomDistribution(k, rng);
    const double t = tv(p, q);
    const double ratio =
        OutputHellinger(minimax_channel(p, q, 0.5), p, q) / (0.25 * t * t);
    EXPECT_GE(ratio, 1.0 / 8.0);
    EXPECT_LE(ratio, 8.0);
  }
}

TEST(Minimax, WorstCasePairNearPrivateOptimum) {
  const auto pair = worst_case_pair(0.05, 0.1);
  const double eps = std::log(10.0);
  const double v = OutputHellinger(minimax_channel(pair.p, pair.q, eps),
                                   pair.p, pair.q);
  const double best = maximize_private(pair.p, pair.q,
                                       pure_ldp_family(3, 2, eps),
                                       Objective::HellingerSq())
                          .value;
  EXPECT_LE(v, best + 1e-15);
  EXPECT_GE(v, best / 8.0);
  const double scale = std::min(0.1 * 0.1, 10.0 * 0.05 * 0.05);
  EXPECT_GE(v / scale, 1.0 / 8.0);
  EXPECT_LE(v / scale, 8.0);
}

// Worst-case pairs with e <= e^eps <= 1 / rho: the best three-output private
// channel tracks max(nu^2, e^eps rho^2).
TEST(TernaryCatalog, TracksTwoRegimeScale) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    const auto [rho, nu] = RandomAdmissible(rng);
    const auto pair = worst_case_pair(rho, nu);
    const double top = std::log(1.0 / rho);
    for (double eps = 1.0; eps <= top; eps += std::max(0.3, top / 15)) {
      const double v = maximize_private(pair.p, pair.q,
                                        pure_ldp_family(3, 3, eps),
                                        Objective::HellingerSq())
                           .value;
      const double scale = std::max(nu * nu, std::exp(eps) * rho * rho);
      EXPECT_GE(v / scale, 1.0 / 64.0);
      EXPECT_LE(v / scale, 64.0);
    }
  }
}

TEST(Comparable, SplitAndContribution) {
  const Distribution p({0.1, 0.3, 0.35, 0.25}), q({0.4, 0.2, 0.2, 0.2});
  const auto s = SplitComparable(p, q);
  EXPECT_TRUE(s.below.empty());
  EXPECT_EQ(s.above, (std::vector<int>{1, 2, 3}));
  EXPECT_NEAR(s.contribution,
              HellingerTerm(0.3, 0.2) + HellingerTerm(0.35, 0.2) +
                  HellingerTerm(0.25, 0.2),
              1e-16);
  EXPECT_LE(s.contribution, hellinger_sq(p, q));
}

// Randomized response over l <= e^eps symbols keeps
// min(1, e^eps tau / l) tau, tau being the comparable contribution.
TEST(Comparable, RandomizedResponseRetainsContribution) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    const int l = 2 + i % 15;
    const auto [p, q] =
        ComparablePair(l, 0.69 * std::pow(10.0, -(i % 4)), rng);
    const double tau = SplitComparable(p, q).contribution;
    ASSERT_GT(tau, 0.0);
    for (double eps = std::log(l); eps < 30.0; eps += 0.7) {
      const double kept =
          OutputHellinger(randomized_response(l, eps), p, q);
      EXPECT_GE(kept, kComparableConstant *
                          std::min(1.0, std::exp(eps) * tau / l) * tau);
    }
  }
}

TEST(Reduce, IdentityWhenSmall) {
  const Distribution p({0.2, 0.8}), q({0.6, 0.4});
  const auto r = reduce_channel(p, q, 3);
  EXPECT_EQ(r.branch, Reduction::Branch::kIdentity);
  EXPECT_EQ(BranchName(r.branch), "identity");
  EXPECT_EQ(r.channel, Channel::Identity(2));
  EXPECT_THROW(reduce_channel(p, q, 1), std::invalid_argument);
}

TEST(Reduce, DisjointSupportsUseBinary) {
  const Distribution p({0.3, 0.3, 0.4, 0, 0, 0}), q({0, 0, 0, 0.5, 0.2, 0.3});
  const auto r = reduce_channel(p, q, 3);
  EXPECT_EQ(r.branch, Reduction::Branch::kBinary);
  EXPECT_GE(r.retained, 0.5 * hellinger_sq(p, q));
  EXPECT_NEAR(r.retained, OutputHellinger(r.channel, p, q), 1e-15);
}

TEST(Reduce, ComparablePairsUseBuckets) {
  std::mt19937_64 rng(9);
  int bucketed = 0;
  for (int i = 0; i < 200; ++i) {
    const int k = 3 + i % 14;
    const auto [p, q] =
        ComparablePair(k, 0.6 * std::pow(10.0, -0.5 * (i % 5)), rng);
    const double h = hellinger_sq(p, q);
    const double cap = std::min<double>(k, 1.0 + std::log(1.0 / h));
    for (int l = 2; l <= cap; ++l) {
      const auto r = reduce_channel(p, q, l);
      if (static_cast<int>(p.size()) <= l) continue;
      ASSERT_EQ(r.branch, Reduction::Branch::kBuckets);
      ++bucketed;
      EXPECT_LE(r.channel.output_size(), static_cast<std::size_t>(l));
      const double tau = SplitComparable(apply(r.channel, p),
                                         apply(r.channel, q))
                             .contribution;
      EXPECT_GE(tau, h * l / (2.0 * cap)) << "k=" << k << " l=" << l;
    }
  }
  EXPECT_GT(bucketed, 100);
}

TEST(FreePrivacy, OutputSizeRule) {
  const Distribution p({0.25, 0.25, 0.25, 0.25}), q({0.2, 0.3, 0.2, 0.3});
  // log2(1 / h) is large, so k and floor(e^eps) bind.
  EXPECT_EQ(FreePrivacyOutputs(p, q, std::log(100.0)), 4);
  EXPECT_EQ(FreePrivacyOutputs(p, q, std::log(2.5)), 2);
  EXPECT_EQ(FreePrivacyOutputs(p, q, std::log(3.5)), 3);
  EXPECT_THROW(free_privacy_channel(p, q, 1.0), std::invalid_argument);
}

TEST(FreePrivacy, BinaryPairLargeEps) {
  const auto p = Distribution::Bernoulli(0.3);
  const auto q = Distribution::Bernoulli(0.5);
  const auto t = free_privacy_channel(p, q, 30.0);
  EXPECT_NEAR(OutputHellinger(t, p, q), hellinger_sq(p, q), 1e-10);
}

TEST(FreePrivacy, RetainsHellingerInLowPrivacyRegime) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 40; ++i) {
    const int k = 2 + i % 15;
    auto [p, q] = i % 2 ? ComparablePair(k, 0.6 * std::pow(10.0, -(i % 3)), rng)
                        : std::pair{test::RandomDistribution(k, rng),
                                    test::RandomDistribution(k, rng)};
    const double h = hellinger_sq(p, q);
    const double e = std::max(4.0 / h, (1.0 / h) * std::log(1.0 / h));
    const double eps = std::max(1.0001, std::log(e));
    const auto t = free_privacy_channel(p, q, eps);
    EXPECT_TRUE(membership(pure_ldp_family(k, static_cast<int>(t.output_size()),
                                           eps),
                           t, 1e-12));
    EXPECT_GE(OutputHellinger(t, p, q), h / 64.0) << "k=" << k << " h=" << h;
  }
}

TEST(ApproxLdp, ConvexCombinationIdentity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const int k = 2 + i % 5;
    const auto p = test::RandomDistribution(k, rng);
    const auto q = test::RandomDistribution(k, rng);
    const double eps = 3 * u(rng), delta = u(rng);
    const auto t = approx_ldp_channel(p, q, eps, delta);
    const double pure = maximize_private(p, q, pure_ldp_family(k, 2, eps),
                                         Objective::HellingerSq())
                            .value;
    EXPECT_NEAR(OutputHellinger(t, p, q),
                (1 - delta) * pure + delta * hellinger_sq(p, q), 1e-12);
  }
}

TEST(ApproxLdp, Endpoints) {
  const Distribution p({0.1, 0.5, 0.4}), q({0.3, 0.3, 0.4});
  const double pure = maximize_private(p, q, pure_ldp_family(3, 2, 1.0),
                                       Objective::HellingerSq())
                          .value;
  EXPECT_NEAR(OutputHellinger(approx_ldp_channel(p, q, 1.0, 0.0), p, q), pure,
              1e-15);
  EXPECT_NEAR(OutputHellinger(approx_ldp_channel(p, q, 1.0, 1.0), p, q),
              hellinger_sq(p, q), 1e-15);
  EXPECT_THROW(approx_ldp_channel(p, q, 1.0, 1.5), std::invalid_argument);
}

TEST(Curve, MonotoneAndAboveNonPrivate) {
  const auto pair = worst_case_pair(1e-3, 1e-2);
  const auto grid = LogGrid(1.0, 1e6, 25);
  const auto curve = complexity_curve(pair.p, pair.q, grid, 3);
  ASSERT_EQ(curve.size(), grid.size());
  const double floor = 1.0 / hellinger_sq(pair.p, pair.q);
  EXPECT_TRUE(std::isinf(curve.front().n_hat));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LE(curve[i].n_hat, curve[i - 1].n_hat * (1 + 1e-12));
    EXPECT_GE(curve[i].n_hat, floor * (1 - 1e-9));
    EXPECT_FALSE(curve[i].certificate.empty());
    EXPECT_NEAR(curve[i].e_eps, grid[i], 0.0);
  }
}

TEST(Curve, SmallEpsilonSlopeIsMinusTwo) {
  const auto pair = binary_pair(1e-3, 3e-2);
  const auto curve =
      complexity_curve(pair.p, pair.q, {std::exp(1e-3), std::exp(1e-2)}, 2);
  const double slope = std::log(curve[1].n_hat / curve[0].n_hat) /
                       std::log(curve[1].eps / curve[0].eps);
  EXPECT_NEAR(slope, -2.0, 0.01);
}

TEST(Curve, ParallelMatchesSerial) {
  const auto pair = worst_case_pair(5e-3, 3e-2);
  const auto grid = LogGrid(1.5, 1e4, 12);
  SetThreadCount(1);
  const auto serial = complexity_curve(pair.p, pair.q, grid, 3);
  SetThreadCount(4);
  const auto parallel = complexity_curve(pair.p, pair.q, grid, 3);
  SetThreadCount(0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(serial[i].n_hat, parallel[i].n_hat);
    EXPECT_EQ(serial[i].certificate, parallel[i].certificate);
  }
}

TEST(Curve, FreePrivacyThresholdAndGrid) {
  const auto g = LogGrid(1.0, 1e4, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_NEAR(g[1], 10.0, 1e-12);
  EXPECT_EQ(g.back(), 1e4);
  EXPECT_EQ(LogGrid(3.0, 9.0, 1), std::vector<double>{3.0});
  EXPECT_THROW(LogGrid(0.0, 1.0, 3), std::invalid_argument);

  const auto pair = binary_pair(2e-4, 1e-2);
  const auto curve = complexity_curve(pair.p, pair.q, LogGrid(1.0, 1e8, 33), 2);
  const double star = FreePrivacyThreshold(curve, pair.p, pair.q);
  ASSERT_TRUE(std::isfinite(star));
  // The binary threshold sits near h / TV^2 = 1.
  EXPECT_LE(std::exp(star), 100.0);
  EXPECT_TRUE(std::isinf(FreePrivacyThreshold(
      {curve.front()}, pair.p, pair.q)));
}

}  // namespace
}  // namespace ldpopt
