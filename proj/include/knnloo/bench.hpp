#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "knnloo/dataset.hpp"
#include "knnloo/loocv.hpp"
#include "knnloo/synth.hpp"

namespace knnloo {

// Timing rows are labelled with one of these method names:
//   brute_refit   rebuilds the index for every held-out row
//   brute_shared  one index, held-out row excluded at query time
//   efficient     one (k+1)-NN fit
struct BenchRow {
  std::size_t n = 0;
  std::string method;
  double seconds = 0.0;
  std::size_t fit_count = 0;
};

struct BenchConfig {
  std::vector<std::size_t> sizes{500, 1000, 2000, 4000, 8000};
  std::size_t k = 5;
  std::size_t repetitions = 5;
  std::size_t input_dim = 3;
  double noise = 0.1;
  std::uint64_t seed = 0;
  LoocvOptions options;
  // When set, each size uses the first n rows of this dataset instead of
  // synthetic data.
  const Dataset* source = nullptr;
};

inline double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

inline Dataset bench_dataset(const BenchConfig& config, std::size_t n) {
  if (config.source == nullptr) {
    return synthesize({n, config.input_dim, 1, config.noise, config.seed});
  }
  if (n > config.source->size()) {
    throw Error(Errc::InvalidArgument, "benchmark size " + std::to_string(n) + " exceeds the " +
                                           std::to_string(config.source->size()) + " rows available");
  }
  std::vector<RowIndex> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return config.source->permuted(rows);
}

// Median wall time of each LOOCV route per size, at fixed k.
inline std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.repetitions == 0) throw Error(Errc::InvalidArgument, "repetitions must be at least 1");
  if (config.sizes.empty()) throw Error(Errc::InvalidArgument, "no benchmark sizes given");
  using Route = std::function<LoocvResult(const Dataset&)>;
  const std::vector<std::pair<std::string, Route>> routes{
      {"brute_refit", [&](const Dataset& d) { return loocv_brute_refit(d, config.k, config.options); }},
      {"brute_shared", [&](const Dataset& d) { return loocv_brute(d, config.k, config.options); }},
      {"efficient", [&](const Dataset& d) { return loocv_efficient(d, config.k, config.options); }},
  };
  std::vector<BenchRow> rows;
  for (std::size_t n : config.sizes) {
    const Dataset data = bench_dataset(config, n);
    for (const auto& [name, route] : routes) {
      std::vector<double> times;
      std::size_t fits = 0;
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        const LoocvResult r = route(data);
        times.push_back(r.wall_time);
        fits = r.fit_count;
      }
      rows.push_back({n, name, median(times), fits});
    }
  }
  return rows;
}

}  // namespace knnloo
