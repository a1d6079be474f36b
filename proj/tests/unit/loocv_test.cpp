#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "knnloo/loocv.hpp"
#include "support/oracles.hpp"

namespace knnloo {
namespace {

Dataset four_points() { return Dataset::scalar({{0}, {1}, {3}, {7}}, {0, 1, 3, 7}); }

TEST(Loocv, GoldenValues) {
  const Dataset data = four_points();
  // Frozen from tests/oracle/golden_oracle.py (exact rationals 11/2, 71/8).
  EXPECT_NEAR(loocv_brute(data, 1).score, 5.5, 1e-12);
  EXPECT_NEAR(loocv_brute(data, 2).score, 8.875, 1e-12);
  EXPECT_NEAR(loocv_efficient(data, 1).score, 5.5, 1e-12);
  EXPECT_NEAR(loocv_efficient(data, 2).score, 8.875, 1e-12);
  EXPECT_NEAR(loocv_brute_refit(data, 1).score, 5.5, 1e-12);
  EXPECT_NEAR(loocv_brute_refit(data, 2).score, 8.875, 1e-12);
  EXPECT_DOUBLE_EQ(testing::oracle_loocv(data, 1), 5.5);
  EXPECT_DOUBLE_EQ(testing::oracle_loocv(data, 2), 8.875);
}

TEST(Loocv, ScaleFactor) {
  EXPECT_EQ(loocv_scale_factor(1), 4.0);
  EXPECT_DOUBLE_EQ(loocv_scale_factor(5), 1.44);
  EXPECT_LT(loocv_scale_factor(1000000) - 1.0, 1e-5);
  for (std::size_t k = 1; k < 100; ++k) EXPECT_GT(loocv_scale_factor(k), loocv_scale_factor(k + 1));
}

TEST(Loocv, ConstantOutputsScoreZero) {
  std::mt19937_64 rng(1);
  const Dataset random = testing::random_dataset(rng, 40, 2, 1);
  const Dataset data(random.inputs(), Matrix(40, 1, -2.0));
  for (std::size_t k : {1u, 10u, 39u}) {
    EXPECT_EQ(loocv_brute(data, k).score, 0.0);
    EXPECT_EQ(loocv_efficient(data, k).score, 0.0);
  }
  const auto sweep = loocv_sweep(data, 1, 5, SweepMethod::Both);
  EXPECT_EQ(sweep.max_relative_discrepancy(), 0.0);
}

TEST(Loocv, Errors) {
  const Dataset data = four_points();
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code_of([&] { loocv_brute(data, 4); }), Errc::KTooLarge);
  EXPECT_EQ(code_of([&] { loocv_efficient(data, 4); }), Errc::KTooLarge);
  const Dataset single = Dataset::scalar({{1.0}}, {2.0});
  EXPECT_EQ(code_of([&] { loocv_brute(single, 1); }), Errc::DatasetTooSmall);
  EXPECT_EQ(code_of([&] { loocv_efficient(single, 1); }), Errc::DatasetTooSmall);
  EXPECT_EQ(code_of([&] { loocv_sweep(data, 1, 4, SweepMethod::Both); }), Errc::KTooLarge);
  EXPECT_EQ(code_of([&] { select_best_k({}); }), Errc::EmptySweep);
}

TEST(Loocv, ResultMetadata) {
  std::mt19937_64 rng(2);
  const Dataset data = testing::random_dataset(rng, 64, 2, 1);
  const auto brute = loocv_brute(data, 3);
  const auto efficient = loocv_efficient(data, 3);
  EXPECT_EQ(brute.method, LoocvMethod::Brute);
  EXPECT_EQ(brute.fit_count, 64u);
  EXPECT_EQ(efficient.method, LoocvMethod::Efficient);
  EXPECT_EQ(efficient.fit_count, 1u);
  EXPECT_GE(brute.score, 0.0);
  EXPECT_GE(efficient.wall_time, 0.0);
}

TEST(Loocv, FitCountInstrumentation) {
  std::mt19937_64 rng(3);
  const Dataset data = testing::random_dataset(rng, 90, 3, 1);
  auto& counters = instrumentation::counters();

  counters.reset();
  loocv_efficient(data, 4);
  EXPECT_EQ(counters.index_builds.load(), 1u);
  EXPECT_EQ(counters.model_fits.load(), 1u);
  EXPECT_EQ(counters.heldout_evaluations.load(), 0u);

  counters.reset();
  loocv_brute(data, 4);
  EXPECT_EQ(counters.index_builds.load(), 1u);
  EXPECT_EQ(counters.heldout_evaluations.load(), 90u);

  counters.reset();
  loocv_brute_refit(data, 4);
  EXPECT_EQ(counters.index_builds.load(), 90u);
  EXPECT_EQ(counters.heldout_evaluations.load(), 90u);

  counters.reset();
  loocv_sweep(data, 2, 6, SweepMethod::Efficient);
  EXPECT_EQ(counters.model_fits.load(), 5u);
}

TEST(Loocv, SelectBestK) {
  std::vector<LoocvResult> scores{{1, 5.0}, {2, 3.0}, {3, 3.0}};
  EXPECT_EQ(select_best_k(scores), 2u);
  std::vector<LoocvResult> decreasing;
  for (std::size_t k = 1; k <= 10; ++k) decreasing.push_back({k, 100.0 / double(k)});
  EXPECT_EQ(select_best_k(decreasing), 10u);
}

// Efficient and brute scores coincide on tie-free data, and both match a
// definition-level oracle with no kd-tree involved.
TEST(Loocv, EquivalenceOnRandomTieFreeData) {
  std::mt19937_64 rng(31);
  for (std::size_t n : {10u, 100u}) {
    for (std::size_t d : {1u, 3u, 10u}) {
      for (std::size_t m : {1u, 2u}) {
        const Dataset data = testing::random_dataset(rng, n, d, m);
        for (std::size_t k = 1; k <= std::min<std::size_t>(25, n - 1); ++k) {
          const double brute = loocv_brute(data, k).score;
          const double efficient = loocv_efficient(data, k).score;
          ASSERT_LE(relative_discrepancy(brute, efficient), 1e-10) << n << ' ' << d << ' ' << k;
          ASSERT_NEAR(brute, testing::oracle_loocv(data, k), 1e-12 * brute);
          ASSERT_EQ(brute, loocv_brute_refit(data, k).score);
        }
      }
    }
  }
}

TEST(Loocv, EfficientAtLeastTrainingError) {
  std::mt19937_64 rng(32);
  const Dataset data = testing::random_dataset(rng, 150, 2, 1);
  for (std::size_t k = 1; k <= 20; ++k) {
    const double train = training_mse(KnnModel(data, k + 1), data);
    const double score = loocv_efficient(data, k).score;
    ASSERT_GT(train, 0.0);
    ASSERT_GT(score, train);
  }
}

TEST(Loocv, SweepBothReportsDiscrepancy) {
  std::mt19937_64 rng(33);
  const Dataset data = testing::random_dataset(rng, 200, 3, 1);
  const auto sweep = loocv_sweep(data, 3, 12, SweepMethod::Both);
  ASSERT_EQ(sweep.brute.size(), 10u);
  ASSERT_EQ(sweep.efficient.size(), 10u);
  ASSERT_EQ(sweep.discrepancy.size(), 10u);
  EXPECT_EQ(sweep.discrepancy.front().k, 3u);
  EXPECT_LE(sweep.max_relative_discrepancy(), 1e-10);
  EXPECT_EQ(sweep.best_k_brute, sweep.best_k_efficient);

  const auto only = loocv_sweep(data, 3, 12, SweepMethod::Efficient);
  EXPECT_TRUE(only.brute.empty());
  EXPECT_TRUE(only.discrepancy.empty());
  EXPECT_EQ(only.best_k_efficient, sweep.best_k_efficient);
}

TEST(Loocv, ThreadCountInvariant) {
  std::mt19937_64 rng(34);
  const Dataset data = testing::random_dataset(rng, 777, 2, 2);
  for (std::size_t k : {1u, 9u}) {
    const double b1 = loocv_brute(data, k, {1}).score;
    const double e1 = loocv_efficient(data, k, {1}).score;
    const double r1 = loocv_brute_refit(data, k, {1}).score;
    for (unsigned t : {2u, 5u}) {
      EXPECT_EQ(loocv_brute(data, k, {t}).score, b1);
      EXPECT_EQ(loocv_efficient(data, k, {t}).score, e1);
      EXPECT_EQ(loocv_brute_refit(data, k, {t}).score, r1);
    }
  }
}

// With duplicated inputs the one-fit shortcut is no longer exact.
TEST(Loocv, DuplicatesBreakTheShortcut) {
  const Dataset data = Dataset::scalar({{0}, {0}, {0}, {1}, {2}, {2}, {5}}, {1, 4, 9, 0, 3, 8, 2});
  const auto sweep = loocv_sweep(data, 1, 2, SweepMethod::Both);
  EXPECT_GT(sweep.discrepancy.front().relative, 1e-10);
  EXPECT_DOUBLE_EQ(sweep.brute.front().score, testing::oracle_loocv(data, 1));
}

}  // namespace
}  // namespace knnloo
