#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "amw/arrivals.hpp"
#include "amw/rng.hpp"

namespace amw {
namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments entry_moments(const TrafficSpec& spec, int i, int j, int draws, std::uint64_t seed) {
  ArrivalSampler s(spec, seed);
  IntMatrix a(spec.n(), 0);
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < draws; ++k) {
    s.sample(a);
    const auto v = static_cast<double>(a(i, j));
    sum += v;
    sum2 += v * v;
  }
  const double m = sum / draws;
  return {m, sum2 / draws - m * m};
}

TEST(Rng, DeterministicAndSeedSensitive) {
  rng::Xoshiro256StarStar a(42), b(42), c(43);
  for (int k = 0; k < 100; ++k) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Rng, UniformInUnitInterval) {
  rng::Xoshiro256StarStar g(1);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double u = g.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 100000));
}

TEST(Rng, SubstreamsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 16; ++i)
    for (std::uint64_t j = 0; j < 16; ++j) seen.insert(rng::substream_seed(9, i, j));
  EXPECT_EQ(seen.size(), 256u);
}

TEST(Arrivals, ZeroRateEntryNeverArrives) {
  TrafficSpec t;
  t.nu = RealMatrix::identity(3);
  t.epsilon = 0.3;
  ArrivalSampler s(t, 5);
  for (int k = 0; k < 10000; ++k) {
    const auto a = s.sample();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) ASSERT_EQ(a(i, j), 0);
  }
}

TEST(Arrivals, PoissonMeanAndVariance) {
  const auto t = TrafficSpec::uniform(4, 0.04);
  const double lambda = 0.24;
  const int draws = 1000000;
  const auto m = entry_moments(t, 1, 2, draws, 77);
  const double three_sigma = 3.0 * std::sqrt(lambda / draws);
  EXPECT_NEAR(m.mean, lambda, three_sigma);
  EXPECT_LE(three_sigma, 0.002);
  EXPECT_NEAR(m.var, lambda, 0.01);
}

TEST(Arrivals, PoissonProbabilities) {
  const auto t = TrafficSpec::uniform(2, 0.2);  // lambda = 0.4
  ArrivalSampler s(t, 3);
  const int draws = 400000;
  std::vector<int> count(6, 0);
  for (int k = 0; k < draws; ++k) ++count[static_cast<std::size_t>(std::min<std::int64_t>(5, s.sample()(0, 0)))];
  double pk = std::exp(-0.4);
  for (int k = 0; k < 4; ++k) {
    const double sd = std::sqrt(pk * (1 - pk) / draws);
    EXPECT_NEAR(count[static_cast<std::size_t>(k)] / double(draws), pk, 5 * sd + 1e-6) << "k=" << k;
    pk *= 0.4 / (k + 1);
  }
}

TEST(Arrivals, BernoulliMean) {
  auto t = TrafficSpec::uniform(2, 0.1);
  t.family = ArrivalFamily::Bernoulli;
  const auto m = entry_moments(t, 0, 1, 200000, 8);
  EXPECT_NEAR(m.mean, 0.45, 4.0 * std::sqrt(0.45 * 0.55 / 200000));
}

TEST(Arrivals, TruncatedSupportAndMean) {
  for (int a_max : {1, 2, 3}) {
    auto t = TrafficSpec::uniform(2, 0.1);
    t.family = ArrivalFamily::TruncatedPoisson;
    t.a_max = a_max;
    ArrivalSampler s(t, 10);
    double sum = 0.0;
    const int draws = 200000;
    for (int k = 0; k < draws; ++k) {
      const auto v = s.sample()(1, 1);
      ASSERT_GE(v, 0);
      ASSERT_LE(v, a_max);
      sum += static_cast<double>(v);
    }
    EXPECT_NEAR(sum / draws, 0.45, 0.005) << "a_max=" << a_max;
  }
}

TEST(Arrivals, TruncatedParameterMatchesMean) {
  for (double mean : {0.1, 0.45, 0.9}) {
    const double theta = truncated_poisson_parameter(mean, 3);
    double z = 0.0, m = 0.0, p = 1.0;
    for (int k = 0; k <= 3; ++k) {
      z += p;
      m += k * p;
      p *= theta / (k + 1);
    }
    EXPECT_NEAR(m / z, mean, 1e-10);
  }
}

TEST(Arrivals, StreamOfAnEntryDoesNotDependOnN) {
  TrafficSpec small, large;
  small.nu = RealMatrix::identity(2);
  large.nu = RealMatrix::identity(5);
  small.epsilon = large.epsilon = 0.3;
  ArrivalSampler a(small, 99), b(large, 99);
  for (int k = 0; k < 5000; ++k) {
    const auto x = a.sample();
    const auto y = b.sample();
    ASSERT_EQ(x(0, 0), y(0, 0));
    ASSERT_EQ(x(1, 1), y(1, 1));
  }
}

TEST(Arrivals, NamesRoundTrip) {
  for (auto f : {ArrivalFamily::Poisson, ArrivalFamily::Bernoulli, ArrivalFamily::TruncatedPoisson})
    EXPECT_EQ(parse_arrival_family(to_string(f)), f);
}

}  // namespace
}  // namespace amw
