#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "knnloo/dataset.hpp"
#include "knnloo/detail/parallel.hpp"
#include "knnloo/detail/summation.hpp"
#include "knnloo/error.hpp"
#include "knnloo/instrumentation.hpp"
#include "knnloo/neighbor_index.hpp"

namespace knnloo {

using OutputVector = std::vector<double>;

namespace detail {

// Mean of the output rows listed in `neighbors`, summed in neighbour order.
inline OutputVector mean_output(const Matrix& outputs, const std::vector<RowIndex>& neighbors) {
  OutputVector mean(outputs.cols(), 0.0);
  for (RowIndex i : neighbors) {
    const PointView y = outputs.row(i);
    for (std::size_t m = 0; m < mean.size(); ++m) mean[m] += y[m];
  }
  const double count = static_cast<double>(neighbors.size());
  for (double& v : mean) v /= count;
  return mean;
}

inline double squared_error(const OutputVector& prediction, PointView target) noexcept {
  double acc = 0.0;
  for (std::size_t m = 0; m < prediction.size(); ++m) {
    const double diff = prediction[m] - target[m];
    acc += diff * diff;
  }
  return acc;
}

inline void check_k_for_loo(std::size_t k, std::size_t n) {
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
  if (n < 2) throw Error(Errc::DatasetTooSmall, "leave-one-out needs at least 2 rows, got " + std::to_string(n));
  if (k > n - 1) {
    throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " but leave-one-out allows at most n - 1 = " +
                                     std::to_string(n - 1));
  }
}

}  // namespace detail

// A fitted k-NN regressor: a shared neighbour index, the training outputs,
// and the neighbour count. The outputs are referenced, not copied, so the
// dataset must outlive the model.
class KnnModel {
 public:
  KnnModel(const Dataset& dataset, std::size_t k)
      : KnnModel(std::make_shared<const NeighborIndex>(dataset.inputs()), dataset.outputs(), k) {}

  KnnModel(std::shared_ptr<const NeighborIndex> index, const Matrix& outputs, std::size_t k)
      : index_(std::move(index)), outputs_(&outputs), k_(k) {
    if (index_->size() != outputs.rows()) {
      throw Error(Errc::DimensionMismatch, "index has " + std::to_string(index_->size()) + " points but " +
                                               std::to_string(outputs.rows()) + " outputs");
    }
    if (k_ == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
    if (k_ > index_->size()) {
      throw Error(Errc::KTooLarge, "k = " + std::to_string(k_) + " exceeds the " +
                                       std::to_string(index_->size()) + " training points");
    }
    instrumentation::counters().model_fits.fetch_add(1, std::memory_order_relaxed);
  }

  std::size_t k() const noexcept { return k_; }
  const NeighborIndex& index() const noexcept { return *index_; }
  const Matrix& outputs() const noexcept { return *outputs_; }

  OutputVector predict(PointView query) const {
    return detail::mean_output(*outputs_, index_->knn_query(query, k_).indices);
  }

 private:
  std::shared_ptr<const NeighborIndex> index_;
  const Matrix* outputs_;
  std::size_t k_;
};

inline OutputVector predict(const KnnModel& model, PointView query) { return model.predict(query); }

// Prediction at x_held_out from the k-NN model fitted without that row.
inline OutputVector predict_loo(const NeighborIndex& index, const Matrix& outputs, std::size_t k,
                                RowIndex held_out) {
  detail::check_k_for_loo(k, index.size());
  const NeighborList list = index.knn_query_excluding(index.point(held_out), k, held_out);
  instrumentation::counters().heldout_evaluations.fetch_add(1, std::memory_order_relaxed);
  return detail::mean_output(outputs, list.indices);
}

inline OutputVector predict_loo(const Dataset& dataset, std::size_t k, RowIndex held_out) {
  detail::check_k_for_loo(k, dataset.size());
  if (held_out >= dataset.size()) {
    throw Error(Errc::InvalidArgument, "held-out row " + std::to_string(held_out) + " out of range");
  }
  const NeighborIndex index(dataset.inputs());
  return predict_loo(index, dataset.outputs(), k, held_out);
}

// Mean over rows of ||predict(x_l) - y_l||^2, evaluated on the model's own
// training data. Row errors are reduced pairwise in row order, so the value
// does not depend on `threads`.
inline double training_mse(const KnnModel& model, const Dataset& dataset, unsigned threads = 1) {
  if (dataset.size() != model.index().size() || dataset.input_dim() != model.index().dim() ||
      dataset.output_dim() != model.outputs().cols()) {
    throw Error(Errc::DimensionMismatch, "training_mse must be evaluated on the model's training data");
  }
  std::vector<double> errors(dataset.size());
  detail::parallel_for(dataset.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t l = begin; l < end; ++l) {
      errors[l] = detail::squared_error(model.predict(dataset.input(l)), dataset.output(l));
    }
  });
  return detail::pairwise_sum(errors) / static_cast<double>(dataset.size());
}

}  // namespace knnloo
