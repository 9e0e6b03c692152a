#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "nmt/noise/noise.hpp"

namespace {

using namespace nmt;
using noise::TransitionMatrix;

std::vector<int> uniform_labels(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> d(0, static_cast<int>(k) - 1);
  std::vector<int> out(n);
  for (auto& v : out) v = d(rng);
  return out;
}

TEST(FlipMatrix, ZeroRateIsIdentity) {
  auto t = noise::uniform_flip_matrix(5, 0.0);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(t.at(j, i), i == j ? 1.0 : 0.0);
}

TEST(FlipMatrix, TenClassesTwentyPercent) {
  auto t = noise::uniform_flip_matrix(10, 0.2);
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(t.at(j, i), i == j ? 0.8 : 0.2 / 9.0, 1e-15);
  EXPECT_NEAR(t.at(1, 0), 0.02222, 1e-5);
  EXPECT_NO_THROW(t.validate());
}

TEST(FlipMatrix, TwoClassesClosedForm) {
  auto t = noise::uniform_flip_matrix(2, 0.4);
  EXPECT_DOUBLE_EQ(t.at(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(t.at(0, 1), 0.4);
  EXPECT_DOUBLE_EQ(t.at(1, 0), 0.4);
  EXPECT_DOUBLE_EQ(t.at(1, 1), 0.6);
}

TEST(FlipMatrix, RejectsBadArguments) {
  EXPECT_THROW(noise::uniform_flip_matrix(4, 1.0), std::invalid_argument);
  EXPECT_THROW(noise::uniform_flip_matrix(4, -0.1), std::invalid_argument);
  EXPECT_THROW(noise::uniform_flip_matrix(1, 0.1), std::invalid_argument);
}

TEST(FlipMatrix, ValidateChecksColumns) {
  TransitionMatrix bad(2, {0.9, 0.5, 0.2, 0.5});
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  TransitionMatrix negative(2, {1.2, 0.0, -0.2, 1.0});
  EXPECT_THROW(negative.validate(), std::invalid_argument);
  // Column-stochastic but not row-stochastic is fine.
  TransitionMatrix ok(2, {0.9, 0.3, 0.1, 0.7});
  EXPECT_NO_THROW(ok.validate());
}

TEST(CorruptDiscrete, IdentityIsIdentity) {
  const auto clean = uniform_labels(5000, 7, 3);
  Rng rng(11);
  const auto out = noise::corrupt_discrete(clean, TransitionMatrix::identity(7), rng);
  EXPECT_EQ(out.labels, clean);
  EXPECT_EQ(out.realized_rate(), 0.0);
}

TEST(CorruptDiscrete, RejectsOutOfRangeLabel) {
  Rng rng(1);
  std::vector<int> clean{0, 4};
  EXPECT_THROW(noise::corrupt_discrete(clean, noise::uniform_flip_matrix(4, 0.1), rng),
               std::out_of_range);
}

TEST(CorruptDiscrete, FlipRateConcentrates) {
  const auto clean = uniform_labels(100000, 10, 5);
  for (double rho : {0.2, 0.3, 0.4}) {
    Rng rng(42);
    const auto out = noise::corrupt_discrete(clean, noise::uniform_flip_matrix(10, rho), rng);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      diff += out.labels[i] != clean[i];
      EXPECT_EQ(out.flipped[i], out.labels[i] != clean[i]);
    }
    const double rate = static_cast<double>(diff) / static_cast<double>(clean.size());
    EXPECT_NEAR(rate, rho, 0.01) << "rho " << rho;
    EXPECT_DOUBLE_EQ(out.realized_rate(), rate);
  }
}

// Pearson test on the offset (wrong - clean) mod K, pooled over classes.
TEST(CorruptDiscrete, WrongClassesAreUniform) {
  const std::size_t k = 10;
  const auto clean = uniform_labels(100000, k, 8);
  Rng rng(2024);
  const auto out = noise::corrupt_discrete(clean, noise::uniform_flip_matrix(k, 0.3), rng);
  std::vector<double> counts(k - 1, 0.0);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (out.labels[i] == clean[i]) continue;
    const int off = (out.labels[i] - clean[i] + static_cast<int>(k)) % static_cast<int>(k);
    counts[static_cast<std::size_t>(off - 1)] += 1.0;
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double expected = total / static_cast<double>(k - 1);
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(k - 2));
  const double p = boost::math::cdf(boost::math::complement(dist, stat));
  EXPECT_GT(p, 0.01) << "chi2 " << stat;
}

TEST(CorruptDiscrete, EmpiricalTransitionsMatch) {
  const std::size_t k = 4;
  const std::size_t per_class = 100000;
  std::vector<int> clean;
  for (std::size_t c = 0; c < k; ++c) clean.insert(clean.end(), per_class, static_cast<int>(c));
  TransitionMatrix t(k, {0.7, 0.1, 0.0, 0.2,  //
                         0.1, 0.6, 0.3, 0.0,  //
                         0.1, 0.2, 0.5, 0.3,  //
                         0.1, 0.1, 0.2, 0.5});
  t.validate();
  Rng rng(77);
  const auto out = noise::corrupt_discrete(clean, t, rng);
  std::vector<double> freq(k * k, 0.0);
  for (std::size_t i = 0; i < clean.size(); ++i)
    freq[static_cast<std::size_t>(out.labels[i]) * k + static_cast<std::size_t>(clean[i])] += 1.0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i)
      EXPECT_NEAR(freq[j * k + i] / per_class, t.at(j, i), 0.01) << j << "," << i;
}

TEST(CorruptDiscrete, ReproducibleUnderSeed) {
  const auto clean = uniform_labels(2000, 5, 9);
  const auto t = noise::uniform_flip_matrix(5, 0.35);
  Rng a(123), b(123), c(124);
  const auto x = noise::corrupt_discrete(clean, t, a);
  const auto y = noise::corrupt_discrete(clean, t, b);
  const auto z = noise::corrupt_discrete(clean, t, c);
  EXPECT_EQ(x.labels, y.labels);
  EXPECT_NE(x.labels, z.labels);
}

std::vector<double> uniform_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> v(n);
  for (auto& e : v) e = u(rng);
  return v;
}

TEST(CorruptContinuous, ZeroRateIsIdentity) {
  const auto clean = uniform_values(2000, 1);
  Rng rng(3);
  const auto out = noise::corrupt_continuous(clean, 2, 0.0, rng);
  EXPECT_EQ(out.values, clean);
  EXPECT_EQ(out.realized_rate(), 0.0);
}

TEST(CorruptContinuous, FullRateIsUniform) {
  const std::size_t n = 100000, d = 2;
  std::vector<double> clean(n * d, 0.9);
  Rng rng(5);
  const auto out = noise::corrupt_continuous(clean, d, 1.0, rng);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0, sq = 0.0, lo = 1.0, hi = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = out.values[i * d + j];
      mean += v;
      sq += v * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    mean /= n;
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_NEAR(sq / n, 1.0 / 3.0, 0.01);
    EXPECT_GE(lo, -1.0);
    EXPECT_LE(hi, 1.0);
  }
  EXPECT_EQ(out.realized_rate(), 1.0);
}

TEST(CorruptContinuous, RateConcentratesAndRowsMoveTogether) {
  const std::size_t n = 100000, d = 2;
  const auto clean = uniform_values(n * d, 6);
  Rng rng(7);
  const auto out = noise::corrupt_continuous(clean, d, 0.4, rng);
  EXPECT_NEAR(out.realized_rate(), 0.4, 0.01);
  for (std::size_t i = 0; i < n; ++i) {
    const bool same0 = out.values[i * d] == clean[i * d];
    const bool same1 = out.values[i * d + 1] == clean[i * d + 1];
    if (out.replaced[i]) {
      EXPECT_FALSE(same0 && same1);
    } else {
      ASSERT_TRUE(same0 && same1);
    }
  }
}

TEST(CorruptContinuous, RejectsBadShapeAndRate) {
  Rng rng(1);
  std::vector<double> v{0.1, 0.2, 0.3};
  EXPECT_THROW(noise::corrupt_continuous(v, 2, 0.1, rng), std::invalid_argument);
  EXPECT_THROW(noise::corrupt_continuous(v, 0, 0.1, rng), std::invalid_argument);
  EXPECT_THROW(noise::corrupt_continuous(v, 1, 1.5, rng), std::invalid_argument);
}

TEST(MajorityVote, SimpleCases) {
  Rng rng(1);
  EXPECT_EQ(noise::majority_vote({{1}, {1}, {2}}, rng), std::vector<int>{1});
  EXPECT_EQ(noise::majority_vote({{3, 0}, {3, 0}, {3, 0}}, rng), (std::vector<int>{3, 0}));
  EXPECT_THROW(noise::majority_vote({}, rng), std::invalid_argument);
  EXPECT_THROW(noise::majority_vote({{1, 2}, {1}}, rng), std::invalid_argument);
}

TEST(MajorityVote, TiesPickAmongTiedLabels) {
  Rng rng(5);
  std::vector<int> seen(4, 0);
  for (int r = 0; r < 400; ++r) {
    const auto out = noise::majority_vote({{0}, {2}, {3}}, rng);
    ++seen[static_cast<std::size_t>(out[0])];
  }
  EXPECT_EQ(seen[1], 0);
  EXPECT_GT(seen[0], 0);
  EXPECT_GT(seen[2], 0);
  EXPECT_GT(seen[3], 0);
}

TEST(MajorityVote, PermutationInvariant) {
  std::vector<std::vector<int>> sets;
  for (std::uint64_t s = 0; s < 4; ++s) sets.push_back(uniform_labels(3000, 5, 100 + s));
  Rng r0(9);
  const auto ref = noise::majority_vote(sets, r0);
  std::vector<std::size_t> order{0, 1, 2, 3};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<std::vector<int>> p;
    for (auto i : order) p.push_back(sets[i]);
    Rng r(9);
    ASSERT_EQ(noise::majority_vote(p, r), ref);
  }
}

TEST(MajorityVote, ReducesNoiseRate) {
  const std::size_t k = 10, n = 100000;
  const auto clean = uniform_labels(n, k, 31);
  const auto t = noise::uniform_flip_matrix(k, 0.4);
  std::vector<std::vector<int>> sets;
  for (std::uint64_t s = 0; s < 3; ++s) {
    Rng rng(500 + s);
    sets.push_back(noise::corrupt_discrete(clean, t, rng).labels);
  }
  Rng rng(3);
  const auto mv = noise::majority_vote(sets, rng);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) wrong += mv[i] != clean[i];
  const double rate = static_cast<double>(wrong) / static_cast<double>(n);
  EXPECT_LT(rate, 0.4);
  // Exact: P(at least two correct) plus P(exactly one correct and it wins the
  // tie against two distinct wrong labels) among the remaining outcomes.
  const double p = 0.6, q = 0.4, w = q / 9.0;
  const double two_plus = p * p * p + 3 * p * p * q;
  const double one_correct_distinct_wrong = 3 * p * (q * q - 9 * w * w);
  const double expected_correct = two_plus + one_correct_distinct_wrong / 3.0;
  EXPECT_NEAR(1.0 - rate, expected_correct, 0.01);
}

}  // namespace
