// Picks k for a synthetic regression problem with the one-fit LOOCV score
// and cross-checks it against the direct leave-one-out computation.

#include <cstdio>

#include "knnloo/knnloo.hpp"

int main() {
  const knnloo::Dataset data = knnloo::synthesize({.n = 400, .input_dim = 2, .output_dim = 1, .noise = 0.2, .seed = 3});
  const auto sweep = knnloo::loocv_sweep(data, 1, 30, knnloo::SweepMethod::Both);

  for (std::size_t i = 0; i < sweep.efficient.size(); ++i) {
    std::printf("k=%2zu  efficient=%.6f  brute=%.6f\n", sweep.efficient[i].k, sweep.efficient[i].score,
                sweep.brute[i].score);
  }
  std::printf("best k: %zu (brute agrees: %s)\n", *sweep.best_k_efficient,
              sweep.best_k_brute == sweep.best_k_efficient ? "yes" : "no");
  std::printf("max relative discrepancy: %.3g\n", sweep.max_relative_discrepancy());
}
