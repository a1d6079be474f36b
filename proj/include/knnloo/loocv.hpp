#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "knnloo/dataset.hpp"
#include "knnloo/detail/parallel.hpp"
#include "knnloo/detail/summation.hpp"
#include "knnloo/error.hpp"
#include "knnloo/neighbor_index.hpp"
#include "knnloo/regression.hpp"

namespace knnloo {

enum class LoocvMethod { Brute, Efficient };

constexpr std::string_view to_string(LoocvMethod method) noexcept {
  return method == LoocvMethod::Brute ? "brute" : "efficient";
}

struct LoocvOptions {
  unsigned threads = 1;
};

struct LoocvResult {
  std::size_t k = 0;
  double score = 0.0;
  LoocvMethod method = LoocvMethod::Efficient;
  // Number of k-NN model fits the score stands for: n for brute, 1 for efficient.
  std::size_t fit_count = 0;
  double wall_time = 0.0;
};

// Guards the relative discrepancy against exact-zero scores.
inline constexpr double kRelativeFloor = 1e-300;

inline double relative_discrepancy(double brute, double efficient) noexcept {
  return std::abs(brute - efficient) / std::max(brute, kRelativeFloor);
}

// ((k+1)/k)^2, the factor turning the (k+1)-NN training error into LOOCV(k).
inline double loocv_scale_factor(std::size_t k) noexcept {
  const double ratio = static_cast<double>(k + 1) / static_cast<double>(k);
  return ratio * ratio;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace detail

// Direct leave-one-out score over a prebuilt index of all n rows: each
// held-out prediction comes from a query that excludes the held-out row.
inline LoocvResult loocv_brute(const Dataset& dataset, const NeighborIndex& index, std::size_t k,
                               const LoocvOptions& options = {}) {
  const auto start = detail::Clock::now();
  detail::check_k_for_loo(k, dataset.size());
  std::vector<double> errors(dataset.size());
  detail::parallel_for(dataset.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t l = begin; l < end; ++l) {
      errors[l] = detail::squared_error(predict_loo(index, dataset.outputs(), k, l), dataset.output(l));
    }
  });
  const double score = detail::pairwise_sum(errors) / static_cast<double>(dataset.size());
  return {k, score, LoocvMethod::Brute, dataset.size(), detail::seconds_since(start)};
}

inline LoocvResult loocv_brute(const Dataset& dataset, std::size_t k, const LoocvOptions& options = {}) {
  const auto start = detail::Clock::now();
  detail::check_k_for_loo(k, dataset.size());
  const NeighborIndex index(dataset.inputs());
  LoocvResult result = loocv_brute(dataset, index, k, options);
  result.wall_time = detail::seconds_since(start);
  return result;
}

// Brute LOOCV that rebuilds a fresh index over the n - 1 remaining rows for
// every held-out row, the way a generic fit/predict loop would.
inline LoocvResult loocv_brute_refit(const Dataset& dataset, std::size_t k, const LoocvOptions& options = {}) {
  const auto start = detail::Clock::now();
  const std::size_t n = dataset.size();
  detail::check_k_for_loo(k, n);
  const std::size_t d = dataset.input_dim();
  std::vector<double> errors(n);
  detail::parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> reduced;
    std::vector<RowIndex> original;
    for (std::size_t l = begin; l < end; ++l) {
      reduced.clear();
      original.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (i == l) continue;
        const PointView x = dataset.input(i);
        reduced.insert(reduced.end(), x.begin(), x.end());
        original.push_back(i);
      }
      const NeighborIndex index(Matrix(n - 1, d, reduced));
      std::vector<RowIndex> neighbors = index.knn_query(dataset.input(l), k).indices;
      for (RowIndex& i : neighbors) i = original[i];
      instrumentation::counters().heldout_evaluations.fetch_add(1, std::memory_order_relaxed);
      errors[l] = detail::squared_error(detail::mean_output(dataset.outputs(), neighbors), dataset.output(l));
    }
  });
  const double score = detail::pairwise_sum(errors) / static_cast<double>(n);
  return {k, score, LoocvMethod::Brute, n, detail::seconds_since(start)};
}

// LOOCV(k) from a single (k+1)-NN fit: ((k+1)/k)^2 times its training MSE.
// Exact whenever no two inputs coincide and no input is equidistant from
// two others; otherwise it may differ from loocv_brute.
inline LoocvResult loocv_efficient(const Dataset& dataset, std::size_t k, const LoocvOptions& options = {}) {
  const auto start = detail::Clock::now();
  detail::check_k_for_loo(k, dataset.size());
  const KnnModel model(dataset, k + 1);
  const double score = loocv_scale_factor(k) * training_mse(model, dataset, options.threads);
  return {k, score, LoocvMethod::Efficient, 1, detail::seconds_since(start)};
}

enum class SweepMethod { Brute, Efficient, Both };

struct Discrepancy {
  std::size_t k = 0;
  double absolute = 0.0;
  double relative = 0.0;
};

struct SweepResult {
  std::vector<LoocvResult> brute;
  std::vector<LoocvResult> efficient;
  std::optional<std::size_t> best_k_brute;
  std::optional<std::size_t> best_k_efficient;
  // Filled only when both methods ran.
  std::vector<Discrepancy> discrepancy;

  double max_relative_discrepancy() const noexcept {
    double worst = 0.0;
    for (const auto& d : discrepancy) worst = std::max(worst, d.relative);
    return worst;
  }
};

// Smallest k attaining the minimum score.
inline std::size_t select_best_k(std::span<const LoocvResult> results) {
  if (results.empty()) throw Error(Errc::EmptySweep, "cannot select k from an empty sweep");
  const LoocvResult* best = &results.front();
  for (const auto& r : results) {
    if (r.score < best->score || (r.score == best->score && r.k < best->k)) best = &r;
  }
  return best->k;
}

using LoocvScorer = std::function<LoocvResult(const Dataset&, std::size_t, const LoocvOptions&)>;

struct SweepScorers {
  LoocvScorer brute = [](const Dataset& d, std::size_t k, const LoocvOptions& o) { return loocv_brute(d, k, o); };
  LoocvScorer efficient = [](const Dataset& d, std::size_t k, const LoocvOptions& o) {
    return loocv_efficient(d, k, o);
  };
};

// Default upper end of a sweep: min(50, n - 1).
inline std::size_t default_k_max(std::size_t n) noexcept { return n < 2 ? 0 : std::min<std::size_t>(50, n - 1); }

inline SweepResult loocv_sweep(const Dataset& dataset, std::size_t k_min, std::size_t k_max, SweepMethod method,
                               const LoocvOptions& options = {}, const SweepScorers& scorers = {}) {
  if (dataset.size() < 2) {
    throw Error(Errc::DatasetTooSmall, "leave-one-out needs at least 2 rows, got " + std::to_string(dataset.size()));
  }
  if (k_min == 0 || k_min > k_max) {
    throw Error(Errc::InvalidArgument,
                "invalid k range [" + std::to_string(k_min) + ", " + std::to_string(k_max) + "]");
  }
  detail::check_k_for_loo(k_max, dataset.size());

  SweepResult result;
  const bool run_brute = method != SweepMethod::Efficient;
  const bool run_efficient = method != SweepMethod::Brute;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    if (run_brute) result.brute.push_back(scorers.brute(dataset, k, options));
    if (run_efficient) result.efficient.push_back(scorers.efficient(dataset, k, options));
  }
  if (run_brute) result.best_k_brute = select_best_k(result.brute);
  if (run_efficient) result.best_k_efficient = select_best_k(result.efficient);
  if (run_brute && run_efficient) {
    for (std::size_t i = 0; i < result.brute.size(); ++i) {
      const double b = result.brute[i].score;
      const double e = result.efficient[i].score;
      result.discrepancy.push_back({result.brute[i].k, std::abs(b - e), relative_discrepancy(b, e)});
    }
  }
  return result;
}

}  // namespace knnloo
