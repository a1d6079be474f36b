#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "knnloo/dataset.hpp"
#include "knnloo/error.hpp"

namespace knnloo {

struct SynthConfig {
  std::size_t n = 100;
  std::size_t input_dim = 2;
  std::size_t output_dim = 1;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

namespace detail {

// Distribution transforms are written out here instead of using the
// <random> distributions, whose output is implementation-defined; this keeps
// generated files identical across standard libraries.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (one draw per call).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

// The regression function used for synthetic data: smooth, bounded, and
// different for each output component.
inline double synth_target(std::span<const double> x, std::size_t component) {
  const double m = static_cast<double>(component);
  double value = std::sin(std::numbers::pi * (1.0 + 0.5 * m) * x[0]);
  for (std::size_t j = 1; j < x.size(); ++j) {
    value += 0.5 * std::cos((1.0 + m) * x[j] + 0.3 * static_cast<double>(j)) / static_cast<double>(j);
  }
  return value;
}

// Inputs uniform on [-1, 1]^D, outputs synth_target(x) + N(0, noise^2).
inline Dataset synthesize(const SynthConfig& config) {
  if (config.n == 0) throw Error(Errc::EmptyDataset, "synthetic dataset needs n >= 1");
  if (config.input_dim == 0 || config.output_dim == 0) {
    throw Error(Errc::InvalidArgument, "synthetic dataset needs input and output dimension >= 1");
  }
  if (!(config.noise >= 0.0) || !std::isfinite(config.noise)) {
    throw Error(Errc::InvalidArgument, "noise level must be finite and non-negative");
  }
  detail::PortableRng rng(config.seed);
  Matrix x(config.n, config.input_dim);
  Matrix y(config.n, config.output_dim);
  for (std::size_t r = 0; r < config.n; ++r) {
    for (std::size_t j = 0; j < config.input_dim; ++j) x(r, j) = 2.0 * rng.uniform() - 1.0;
    for (std::size_t m = 0; m < config.output_dim; ++m) {
      const double eps = config.noise > 0.0 ? config.noise * rng.normal() : 0.0;
      y(r, m) = synth_target(x.row(r), m) + eps;
    }
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace knnloo
