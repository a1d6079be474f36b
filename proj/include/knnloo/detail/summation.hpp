#pragma once

#include <cstddef>
#include <span>

namespace knnloo::detail {

// Pairwise (cascade) summation with a fixed split rule, so the result only
// depends on the values and their order, never on how they were produced.
inline double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace knnloo::detail
