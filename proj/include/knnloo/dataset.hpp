#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "knnloo/error.hpp"
#include "knnloo/matrix.hpp"

namespace knnloo {

// n training pairs (x_i, y_i) with x_i in R^D and y_i in R^M, in row order.
// Column names are carried along for output files and may be empty.
class Dataset {
 public:
  Dataset() = default;

  Dataset(Matrix inputs, Matrix outputs, std::vector<std::string> feature_names = {},
          std::vector<std::string> target_names = {})
      : inputs_(std::move(inputs)),
        outputs_(std::move(outputs)),
        feature_names_(std::move(feature_names)),
        target_names_(std::move(target_names)) {
    if (inputs_.rows() == 0) throw Error(Errc::EmptyDataset, "dataset has no rows");
    if (inputs_.rows() != outputs_.rows()) {
      throw Error(Errc::DimensionMismatch, std::to_string(inputs_.rows()) + " input rows but " +
                                               std::to_string(outputs_.rows()) + " output rows");
    }
    if (inputs_.cols() == 0) throw Error(Errc::DimensionMismatch, "inputs have dimension 0");
    if (outputs_.cols() == 0) throw Error(Errc::DimensionMismatch, "outputs have dimension 0");
    if (!inputs_.all_finite()) throw Error(Errc::NonFiniteInput, "inputs contain NaN or Inf");
    if (!outputs_.all_finite()) throw Error(Errc::NonFiniteInput, "outputs contain NaN or Inf");
    if (feature_names_.empty()) feature_names_ = default_names("x", inputs_.cols());
    if (target_names_.empty()) target_names_ = default_names("y", outputs_.cols());
    if (feature_names_.size() != inputs_.cols() || target_names_.size() != outputs_.cols()) {
      throw Error(Errc::DimensionMismatch, "column name count does not match data width");
    }
  }

  // Scalar-output convenience constructor.
  static Dataset scalar(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    return Dataset(Matrix::from_rows(x), Matrix::column(y));
  }

  std::size_t size() const noexcept { return inputs_.rows(); }
  std::size_t input_dim() const noexcept { return inputs_.cols(); }
  std::size_t output_dim() const noexcept { return outputs_.cols(); }

  const Matrix& inputs() const noexcept { return inputs_; }
  const Matrix& outputs() const noexcept { return outputs_; }
  PointView input(RowIndex i) const noexcept { return inputs_.row(i); }
  PointView output(RowIndex i) const noexcept { return outputs_.row(i); }

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<std::string>& target_names() const noexcept { return target_names_; }

  // Same data with rows reordered so that row r of the result is row order[r] of this.
  Dataset permuted(const std::vector<RowIndex>& order) const {
    Matrix x(order.size(), input_dim());
    Matrix y(order.size(), output_dim());
    for (std::size_t r = 0; r < order.size(); ++r) {
      std::copy_n(input(order[r]).begin(), input_dim(), x.row(r).begin());
      std::copy_n(output(order[r]).begin(), output_dim(), y.row(r).begin());
    }
    return Dataset(std::move(x), std::move(y), feature_names_, target_names_);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  static std::vector<std::string> default_names(const std::string& prefix, std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
    return names;
  }

  Matrix inputs_;
  Matrix outputs_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> target_names_;
};

}  // namespace knnloo
