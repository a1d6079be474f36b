#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "knnloo/error.hpp"

namespace knnloo {

using RowIndex = std::size_t;

// A read-only view of one point (a row of inputs or outputs).
using PointView = std::span<const double>;

// Dense row-major matrix of doubles; rows are points or output vectors.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(Errc::DimensionMismatch, "matrix storage has " + std::to_string(data_.size()) +
                                               " values, expected " + std::to_string(rows_ * cols_));
    }
  }

  // Builds from nested rows; every row must have the same length.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix{};
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) {
        throw Error(Errc::DimensionMismatch, "row " + std::to_string(r) + " has " +
                                                 std::to_string(rows[r].size()) + " values, expected " +
                                                 std::to_string(cols));
      }
      data.insert(data.end(), rows[r].begin(), rows[r].end());
    }
    return Matrix(rows.size(), cols, std::move(data));
  }

  // n x 1 column from scalars.
  static Matrix column(const std::vector<double>& values) {
    return Matrix(values.size(), 1, std::vector<double>(values));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  PointView row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }

  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  std::span<const double> values() const noexcept { return data_; }

  bool all_finite() const noexcept {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace knnloo
