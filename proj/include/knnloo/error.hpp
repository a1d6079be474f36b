#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knnloo {

enum class Errc {
  EmptyDataset,
  DimensionMismatch,
  NonFiniteInput,
  KTooLarge,
  DatasetTooSmall,
  EmptySweep,
  IoError,
  ParseError,
  MissingColumn,
  NonNumericCell,
  ConstantFeature,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::DatasetTooSmall: return "DatasetTooSmall";
    case Errc::EmptySweep: return "EmptySweep";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::ConstantFeature: return "ConstantFeature";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// All library failures are reported through this type; code() identifies the
// failure class and what() carries a message naming the offending input.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace knnloo
