#pragma once

#include <atomic>
#include <cstddef>

namespace knnloo::instrumentation {

// Process-wide counters used to check how much work each LOOCV route does.
struct Counters {
  std::atomic<std::size_t> index_builds{0};
  std::atomic<std::size_t> model_fits{0};
  std::atomic<std::size_t> heldout_evaluations{0};

  void reset() noexcept {
    index_builds = 0;
    model_fits = 0;
    heldout_evaluations = 0;
  }
};

inline Counters& counters() noexcept {
  static Counters instance;
  return instance;
}

}  // namespace knnloo::instrumentation
