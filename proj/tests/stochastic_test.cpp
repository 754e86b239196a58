#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "lvrlab/gbm.hpp"
#include "lvrlab/random.hpp"

using namespace lvrlab;

namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(GbmStep, DegenerateDiffusionKeepsPrice) {
  const GbmParams params{0.0, 0.0, 100};
  EXPECT_EQ(gbm_step(3.5, params, 1.7), 3.5);
}

TEST(GbmStep, AnalyticPlugIn) {
  const GbmParams params{0.0, 0.05, 1};
  EXPECT_DOUBLE_EQ(gbm_step(2.0, params, 0.0), 2.0 * std::exp(-0.00125));
  EXPECT_DOUBLE_EQ(gbm_step(2.0, params, 1.0), 2.0 * std::exp(-0.00125 + 0.05));
}

TEST(GbmStep, SampleVolatilityMatchesSigma) {
  const GbmParams params{0.0, 0.05, 1};
  auto z = normal_stream(9, 0);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::log(gbm_step(1.0, params, z()));
    sum += r;
    sq += r * r;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sq - n * mean * mean) / (n - 1));
  EXPECT_NEAR(sd, 0.05, 0.01 * 0.05);
}

TEST(GbmParams, Validation) {
  EXPECT_THROW((GbmParams{0.0, -0.1, 100}.validate()), config_error);
  EXPECT_THROW((GbmParams{0.0, 0.05, 0}.validate()), config_error);
  EXPECT_DOUBLE_EQ((GbmParams{0.0, 0.05, 100}.dt()), 0.01);
}

TEST(MakePath, ConstantWithoutVolatility) {
  const auto path = make_path({0.0, 0.0, 10}, 3, 2.5, 1, 0);
  ASSERT_EQ(path.prices.size(), 30u);
  for (double p : path.prices) {
    EXPECT_EQ(p, 2.5);
  }
}

TEST(MakePath, DeterministicBytes) {
  const GbmParams params{0.0, 0.05, 100};
  const auto a = make_path(params, 5, 1.0, 77, 12);
  const auto b = make_path(params, 5, 1.0, 77, 12);
  ASSERT_EQ(a.prices.size(), 500u);
  EXPECT_EQ(std::memcmp(a.prices.data(), b.prices.data(), a.prices.size() * sizeof(double)), 0);
  const auto c = make_path(params, 5, 1.0, 77, 13);
  EXPECT_NE(a.prices, c.prices);
}

TEST(MakePath, AllPricesPositive) {
  const auto path = make_path({0.0, 2.0, 10}, 50, 1.0, 5, 0);
  for (double p : path.prices) {
    EXPECT_GT(p, 0.0);
  }
}

TEST(MakePath, TerminalLogPriceMeanWithinThreeStandardErrors) {
  const GbmParams params{0.01, 0.05, 10};
  const int days = 10;
  const int n = 10000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(make_path(params, days, 1.0, 2024, i).prices.back());
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq - n * mean * mean) / (n - 1) / n);
  const double expected = (0.01 - 0.5 * 0.05 * 0.05) * days;
  EXPECT_LT(std::abs(mean - expected), 3.0 * se);
}

TEST(MakePath, RejectsBadArguments) {
  EXPECT_THROW(make_path({0.0, 0.05, 10}, 0, 1.0, 1, 0), config_error);
  EXPECT_THROW(make_path({0.0, 0.05, 10}, 1, 0.0, 1, 0), config_error);
}

TEST(MakePath, SubstepsMatchSingleStepWithMatchedDraws) {
  // Splitting a day into n blocks with draws z_1..z_n equals one daily step
  // with z = sum(z_i) / sqrt(n).
  const int n = 16;
  const GbmParams fine{0.02, 0.05, n};
  const GbmParams coarse{0.02, 0.05, 1};
  auto z = normal_stream(5, 3);
  for (int trial = 0; trial < 200; ++trial) {
    double price = 1.0;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double draw = z();
      total += draw;
      price = gbm_step(price, fine, draw);
    }
    EXPECT_NEAR(price, gbm_step(1.0, coarse, total / std::sqrt(double(n))), 1e-12);
  }
}

TEST(NormalStream, KolmogorovSmirnovBelowOnePercentCritical) {
  const int n = 100000;
  auto z = normal_stream(42, 1);
  std::vector<double> draws(n);
  for (double& d : draws) {
    d = z();
  }
  std::sort(draws.begin(), draws.end());
  double stat = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = standard_normal_cdf(draws[i]);
    stat = std::max({stat, f - double(i) / n, double(i + 1) / n - f});
  }
  EXPECT_LT(stat, 1.6276 / std::sqrt(double(n)));
}

TEST(NormalStream, StreamsForDifferentIndicesDiffer) {
  auto a = normal_stream(42, 0);
  auto b = normal_stream(42, 1);
  int equal = 0;
  for (int i = 0; i < 10000; ++i) {
    equal += a() == b();
  }
  EXPECT_EQ(equal, 0);
}

TEST(NormalStream, GoldenFirstEightDraws) {
  constexpr std::array<double, 8> golden{
      -0.10696181844229502, 0.65889643221869842, -0.43226986794935823, 0.56916795690354072,
      0.76178585565247225,  -2.0006601251832223, 1.3522669760814467,   2.2364420501586189,
  };
  auto z = normal_stream(42, 0);
  for (double g : golden) {
    EXPECT_EQ(z(), g);
  }
}
