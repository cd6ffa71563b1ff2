#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mcvd/arrival_models.hpp"
#include "oracles/oracles.hpp"

using namespace mcvd;

TEST(ArrivalModels, ZeroHittingProbabilityIsUnitMassAtZero) {
  for (ModelKind k : kAllModels) {
    const auto cdf = model_cdf(k, {{50}}, {{0.0}});
    for (std::int64_t x = 0; x <= 60; ++x) EXPECT_EQ(cdf(x), 1.0) << to_string(k);
    EXPECT_EQ(cdf(-1), 0.0);
  }
}

TEST(ArrivalModels, AllZeroHistoryIsUnitMassAtZero) {
  for (ModelKind k : kAllModels) {
    const auto cdf = model_cdf(k, {{0, 0, 0}}, {{0.4, 0.1, 0.05}});
    EXPECT_EQ(cdf.values().size(), 1U);
    EXPECT_EQ(cdf(0), 1.0);
    EXPECT_EQ(cdf(5), 1.0);
  }
}

TEST(ArrivalModels, BinomialSmallCases) {
  const auto two = model_cdf(ModelKind::binomial, {{2}}, {{0.5}});
  EXPECT_DOUBLE_EQ(two(0), 0.25);
  EXPECT_DOUBLE_EQ(two(1), 0.75);
  EXPECT_DOUBLE_EQ(two(2), 1.0);
  const auto pair = model_cdf(ModelKind::binomial, {{1, 1}}, {{0.5, 0.5}});
  EXPECT_DOUBLE_EQ(pair(0), 0.25);
  EXPECT_DOUBLE_EQ(pair(1), 0.75);
}

TEST(ArrivalModels, PoissonKnownValue) {
  EXPECT_NEAR(model_cdf(ModelKind::poisson, {{100}}, {{0.1}})(10), 0.58304, 1e-5);
}

TEST(ArrivalModels, MeanAndVariance) {
  auto b = model_mean_var(ModelKind::binomial, {{100}}, {{0.1}});
  EXPECT_DOUBLE_EQ(b.mean, 10);
  EXPECT_DOUBLE_EQ(b.variance, 9);
  auto g = model_mean_var(ModelKind::gaussian, {{100}}, {{0.1}});
  EXPECT_DOUBLE_EQ(g.variance, 9);
  auto p = model_mean_var(ModelKind::poisson, {{100}}, {{0.1}});
  EXPECT_DOUBLE_EQ(p.variance, 10);
  auto z = model_mean_var(ModelKind::binomial, {{0, 0, 0}}, {{0.3, 0.2, 0.1}});
  EXPECT_EQ(z.mean, 0.0);
  EXPECT_EQ(z.variance, 0.0);
  // Oldest emission sees the later tap: [100, 50] with phi = [0.2, 0.1].
  auto two = model_mean_var(ModelKind::binomial, {{50, 100}}, {{0.2, 0.1}});
  EXPECT_DOUBLE_EQ(two.mean, 25);
  EXPECT_DOUBLE_EQ(two.variance, 20.5);
}

TEST(ArrivalModels, HistoryLongerThanChannelUsesZeroTaps) {
  auto mv = model_mean_var(ModelKind::binomial, {{100, 100, 100}}, {{0.3}});
  EXPECT_DOUBLE_EQ(mv.mean, 30);
}

TEST(ArrivalModels, BinomialMatchesEnumerationOracle) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> amount(0, 10);
  std::uniform_real_distribution<double> prob(0.0, 0.6);
  for (int rep = 0; rep < 40; ++rep) {
    const int len = 1 + rep % 4;
    std::vector<int> amounts(len);
    std::vector<double> phis(len);
    EmissionHistory h;
    ChannelResponse ch;
    for (int i = 0; i < len; ++i) {
      amounts[i] = amount(gen);
      h.amounts.push_back(amounts[i]);
      ch.phi.push_back(prob(gen) / len);
    }
    // Emission k (oldest first) sees channel slot len - k.
    for (int k = 0; k < len; ++k) phis[k] = ch.phi[len - 1 - k];
    const auto expected = oracle::sum_binom_enumerate(amounts, phis);
    const auto cdf = model_cdf(ModelKind::binomial, h, ch);
    for (std::size_t x = 0; x < expected.size(); ++x) {
      EXPECT_NEAR(cdf(static_cast<std::int64_t>(x)), expected[x], 1e-13);
    }
  }
}

TEST(ArrivalModels, SingleEmissionMatchesBruteForceBinomial) {
  for (int n : {1, 17, 60}) {
    for (double p : {0.01, 0.3, 0.99}) {
      const auto cdf = model_cdf(ModelKind::binomial, {{n}}, {{p}});
      for (int x = 0; x <= n; ++x) EXPECT_NEAR(cdf(x), oracle::binom_cdf_bruteforce(n, p, x), 1e-12);
    }
  }
}

TEST(ArrivalModels, GaussianHasNoContinuityCorrection) {
  const auto cdf = model_cdf(ModelKind::gaussian, {{100}}, {{0.5}});
  EXPECT_DOUBLE_EQ(cdf(50), 0.5);
  EXPECT_NEAR(cdf(55), 1 - oracle::normal_tail(1.0), 1e-15);
}

TEST(ArrivalModels, CdfPropertiesHoldForEveryModel) {
  const EmissionHistory h{{100, 0, 100, 100}};
  const ChannelResponse ch{{0.46, 0.07, 0.03, 0.018}};
  for (ModelKind k : kAllModels) {
    const auto cdf = model_cdf(k, h, ch);
    double prev = 0.0;
    for (std::int64_t x = 0; x <= h.total(); ++x) {
      EXPECT_GE(cdf(x), prev - 1e-15);
      EXPECT_LE(cdf(x), 1.0);
      EXPECT_GE(cdf(x), 0.0);
      prev = cdf(x);
    }
    EXPECT_NEAR(cdf(h.total()), 1.0, 1e-12) << to_string(k);
  }
}

TEST(ArrivalModels, CappedSupportIsExactBelowCap) {
  const EmissionHistory h{{1000, 1000}};
  const ChannelResponse ch{{0.3, 0.05}};
  const auto full = model_cdf(ModelKind::binomial, h, ch);
  const auto capped = model_cdf(ModelKind::binomial, h, ch, {true, 12.0});
  for (std::int64_t x = 0; x <= 500; ++x) EXPECT_NEAR(capped(x), full(x), 1e-14);
}

TEST(ArrivalModels, EvaluationBeyondSupport) {
  const auto p = model_cdf(ModelKind::poisson, {{10}}, {{0.5}});
  EXPECT_LT(p(10), 1.0);
  EXPECT_GT(p(11), p(10));
  EXPECT_EQ(model_cdf(ModelKind::binomial, {{10}}, {{0.5}})(11), 1.0);
}

TEST(ArrivalModels, RejectsInvalidInput) {
  EXPECT_THROW(model_cdf(ModelKind::binomial, {{}}, {{0.1}}), DomainError);
  EXPECT_THROW(model_cdf(ModelKind::binomial, {{-1}}, {{0.1}}), DomainError);
  EXPECT_THROW(model_cdf(ModelKind::binomial, {{5}}, {{1.5}}), DomainError);
  EXPECT_THROW(model_cdf(ModelKind::binomial, {{5}}, {{0.7, 0.6}}), DomainError);
  EXPECT_THROW(model_cdf(ModelKind::gaussian, {{5}}, {{1.0}}), DomainError);
}
