#include <gtest/gtest.h>

#include <sstream>

#include "knnloo/bench.hpp"
#include "knnloo/data.hpp"
#include "knnloo/synth.hpp"
#include "support/oracles.hpp"

namespace knnloo {
namespace {

TEST(Synth, SeededAndReproducible) {
  const SynthConfig config{.n = 120, .input_dim = 3, .output_dim = 2, .noise = 0.3, .seed = 7};
  EXPECT_EQ(synthesize(config), synthesize(config));
  SynthConfig other = config;
  other.seed = 8;
  EXPECT_NE(synthesize(config), synthesize(other));
}

TEST(Synth, ShapesAndRange) {
  const Dataset data = synthesize({.n = 300, .input_dim = 4, .output_dim = 3, .noise = 0.0, .seed = 1});
  EXPECT_EQ(data.size(), 300u);
  EXPECT_EQ(data.input_dim(), 4u);
  EXPECT_EQ(data.output_dim(), 3u);
  for (double v : data.inputs().values()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
  for (std::size_t r = 0; r < data.size(); ++r)
    for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(data.output(r)[m], synth_target(data.input(r), m));
}

TEST(Synth, TieFreeForMultivariateInputs) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset data = synthesize({.n = 400, .input_dim = 2, .output_dim = 1, .noise = 0.1, .seed = seed});
    EXPECT_TRUE(detect_ties(data).assumption_holds);
  }
}

TEST(Synth, NoiselessLoocvMatchesOracle) {
  const Dataset data = synthesize({.n = 150, .input_dim = 2, .output_dim = 1, .noise = 0.0, .seed = 4});
  std::ostringstream csv;
  write_csv(data, csv);
  const Dataset back = dataset_from_table(parse_csv(csv.str()), {"y0"});
  const double oracle = testing::oracle_loocv(back, 1);
  EXPECT_NEAR(loocv_brute(back, 1).score, oracle, 1e-13 * oracle);
  EXPECT_NEAR(loocv_efficient(back, 1).score, oracle, 1e-10 * oracle);
}

TEST(Synth, RejectsBadConfig) {
  EXPECT_THROW(synthesize({.n = 0}), Error);
  EXPECT_THROW(synthesize({.n = 5, .input_dim = 0}), Error);
  EXPECT_THROW(synthesize({.n = 5, .noise = -1.0}), Error);
}

TEST(Bench, MedianOfRepetitions) {
  EXPECT_EQ(median({3.0, 1.0, 2.0, 10.0, 0.5}), 2.0);
  EXPECT_EQ(median({4.0, 1.0}), 2.5);
}

TEST(Bench, RowsPerSizeAndMethod) {
  BenchConfig config;
  config.sizes = {50, 80};
  config.repetitions = 3;
  const auto rows = run_bench(config);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].method, "brute_refit");
  EXPECT_EQ(rows[1].method, "brute_shared");
  EXPECT_EQ(rows[2].method, "efficient");
  EXPECT_EQ(rows[0].fit_count, 50u);
  EXPECT_EQ(rows[2].fit_count, 1u);
  EXPECT_EQ(rows[5].n, 80u);
  for (const auto& r : rows) EXPECT_GE(r.seconds, 0.0);
}

TEST(Bench, FileSourceNeedsEnoughRows) {
  const Dataset data = synthesize({.n = 60, .input_dim = 2, .output_dim = 1, .noise = 0.1, .seed = 2});
  BenchConfig config;
  config.sizes = {40, 100};
  config.repetitions = 1;
  config.source = &data;
  EXPECT_THROW(run_bench(config), Error);
  config.sizes = {40};
  EXPECT_EQ(run_bench(config).size(), 3u);
}

}  // namespace
}  // namespace knnloo
