#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "knnloo/dataset.hpp"
#include "knnloo/detail/format.hpp"
#include "knnloo/detail/parallel.hpp"
#include "knnloo/error.hpp"
#include "knnloo/neighbor_index.hpp"

namespace knnloo {

// ---------------------------------------------------------------------------
// CSV input/output
// ---------------------------------------------------------------------------

struct CsvOptions {
  char delimiter = ',';
};

// Header plus raw cells; rows are numbered from 1 (the header is row 0).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

// Splits RFC-4180 style text into records. Quoted fields may contain the
// delimiter, doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> split_records(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto finish_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // A blank line yields a single empty field; skip it.
    if (!(record.size() == 1 && record.front().empty() && !field_started)) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      field_started = true;
    } else if (c == delimiter) {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n') {
      ++line;
      finish_record();
    } else if (c == '\r') {
      // tolerated before '\n'
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw Error(Errc::ParseError, "unterminated quoted field at line " + std::to_string(line));
  if (field_started || !record.empty()) finish_record();
  return records;
}

inline std::string quote_if_needed(const std::string& cell, char delimiter) {
  if (cell.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

inline CsvTable parse_csv(std::string_view text, const CsvOptions& options = {}) {
  auto records = detail::split_records(text, options.delimiter);
  if (records.empty()) throw Error(Errc::ParseError, "missing header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (auto& name : table.header) name = std::string(detail::trim(name));
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw Error(Errc::ParseError, "row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                        " cells, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "failed reading '" + path + "'");
  return buffer.str();
}

// Builds a Dataset from the named columns of a parsed table. With no
// feature columns given, every non-target column is a feature.
inline Dataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& target_columns,
                                  const std::vector<std::string>& feature_columns = {}) {
  if (target_columns.empty()) throw Error(Errc::MissingColumn, "no target column given");
  auto locate = [&](const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw Error(Errc::MissingColumn, "column '" + name + "' not in header");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  std::vector<std::size_t> targets;
  for (const auto& name : target_columns) targets.push_back(locate(name));
  std::vector<std::size_t> features;
  if (feature_columns.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (std::find(targets.begin(), targets.end(), c) == targets.end()) features.push_back(c);
    }
  } else {
    for (const auto& name : feature_columns) features.push_back(locate(name));
  }
  if (features.empty()) throw Error(Errc::MissingColumn, "no feature columns remain after removing targets");
  if (table.rows.empty()) throw Error(Errc::EmptyDataset, "file has a header but no data rows");

  auto cell_value = [&](std::size_t r, std::size_t c) {
    const auto value = detail::parse_double(table.rows[r][c]);
    const std::string where = "row " + std::to_string(r + 1) + ", column '" + table.header[c] + "'";
    if (!value) {
      throw Error(Errc::NonNumericCell,
                  "parse error at " + where + ": '" + table.rows[r][c] + "' is not a number");
    }
    if (!std::isfinite(*value)) throw Error(Errc::NonFiniteInput, "non-finite value at " + where);
    return *value;
  };

  const std::size_t n = table.rows.size();
  Matrix x(n, features.size());
  Matrix y(n, targets.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < features.size(); ++j) x(r, j) = cell_value(r, features[j]);
    for (std::size_t m = 0; m < targets.size(); ++m) y(r, m) = cell_value(r, targets[m]);
  }
  std::vector<std::string> feature_names;
  for (auto c : features) feature_names.push_back(table.header[c]);
  return Dataset(std::move(x), std::move(y), std::move(feature_names), target_columns);
}

inline Dataset load_csv(const std::string& path, const std::vector<std::string>& target_columns,
                        const std::vector<std::string>& feature_columns = {}, const CsvOptions& options = {}) {
  return dataset_from_table(parse_csv(read_text_file(path), options), target_columns, feature_columns);
}

// Features then targets, values in shortest round-trip form.
inline void write_csv(const Dataset& dataset, std::ostream& out, const CsvOptions& options = {}) {
  const char sep = options.delimiter;
  bool first = true;
  for (const auto* names : {&dataset.feature_names(), &dataset.target_names()}) {
    for (const auto& name : *names) {
      if (!first) out << sep;
      out << detail::quote_if_needed(name, sep);
      first = false;
    }
  }
  out << '\n';
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    first = true;
    for (PointView row : {dataset.input(r), dataset.output(r)}) {
      for (double v : row) {
        if (!first) out << sep;
        out << detail::format_double(v);
        first = false;
      }
    }
    out << '\n';
  }
}

inline void save_csv(const Dataset& dataset, const std::string& path, const CsvOptions& options = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  write_csv(dataset, out, options);
  if (!out) throw Error(Errc::IoError, "failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct FeatureScale {
  double mean = 0.0;
  double std = 1.0;
};

struct StandardizedDataset {
  Dataset dataset;
  std::vector<FeatureScale> scales;
};

// Shifts and scales every input feature to mean 0 and population standard
// deviation 1. Outputs are left as they are.
inline StandardizedDataset standardize(const Dataset& dataset) {
  const std::size_t n = dataset.size();
  if (n < 2) throw Error(Errc::DatasetTooSmall, "standardization needs at least 2 rows");
  const std::size_t d = dataset.input_dim();
  Matrix x = dataset.inputs();
  std::vector<FeatureScale> scales(d);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += x(r, j);
    const double mean = sum / static_cast<double>(n);
    double squares = 0.0;
    for (std::size_t r = 0; r < n; ++r) squares += (x(r, j) - mean) * (x(r, j) - mean);
    const double std = std::sqrt(squares / static_cast<double>(n));
    if (!(std > 0.0)) {
      throw Error(Errc::ConstantFeature, "feature '" + dataset.feature_names()[j] + "' is constant");
    }
    for (std::size_t r = 0; r < n; ++r) x(r, j) = (x(r, j) - mean) / std;
    scales[j] = {mean, std};
  }
  return {Dataset(std::move(x), dataset.outputs(), dataset.feature_names(), dataset.target_names()),
          std::move(scales)};
}

// ---------------------------------------------------------------------------
// Tie diagnostics
// ---------------------------------------------------------------------------

// Row `anchor` is exactly equidistant from rows `first` < `second`, neither
// of which is the anchor itself.
struct TieTriple {
  RowIndex anchor = 0;
  RowIndex first = 0;
  RowIndex second = 0;

  friend auto operator<=>(const TieTriple&, const TieTriple&) = default;
};

struct TieReport {
  // Groups of rows with identical inputs, each sorted, ordered by first row.
  std::vector<std::vector<RowIndex>> duplicate_groups;
  std::vector<TieTriple> tie_triples;
  bool triples_evaluated = false;
  // No duplicates and no distance ties (among the checks that were run).
  bool assumption_holds = true;
};

struct TieOptions {
  // The distance-tie scan is O(n^2 log n) time and may report O(n^3)
  // triples; above this many rows only duplicates are checked.
  std::size_t max_rows_for_triples = 2000;
  unsigned threads = 1;
};

namespace detail {

// Row indices grouped by coordinate-wise equal inputs, in first-occurrence order.
inline std::vector<std::vector<RowIndex>> group_equal_inputs(const Dataset& dataset) {
  auto less = [&](RowIndex a, RowIndex b) {
    const PointView pa = dataset.input(a);
    const PointView pb = dataset.input(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::map<RowIndex, std::vector<RowIndex>, decltype(less)> groups(less);
  std::vector<RowIndex> first_seen;
  for (RowIndex r = 0; r < dataset.size(); ++r) {
    auto [it, inserted] = groups.try_emplace(r);
    if (inserted) first_seen.push_back(r);
    it->second.push_back(r);
  }
  std::vector<std::vector<RowIndex>> ordered;
  ordered.reserve(first_seen.size());
  for (RowIndex r : first_seen) ordered.push_back(std::move(groups.find(r)->second));
  return ordered;
}

}  // namespace detail

inline TieReport detect_ties(const Dataset& dataset, const TieOptions& options = {}) {
  TieReport report;
  for (auto& group : detail::group_equal_inputs(dataset)) {
    if (group.size() >= 2) report.duplicate_groups.push_back(std::move(group));
  }

  const std::size_t n = dataset.size();
  if (n <= options.max_rows_for_triples) {
    report.triples_evaluated = true;
    std::vector<std::vector<TieTriple>> per_anchor(n);
    detail::parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
      std::vector<std::pair<double, RowIndex>> ranked;
      for (RowIndex anchor = begin; anchor < end; ++anchor) {
        ranked.clear();
        for (RowIndex i = 0; i < n; ++i) {
          if (i != anchor) ranked.emplace_back(squared_distance(dataset.input(anchor), dataset.input(i)), i);
        }
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t a = 0; a < ranked.size();) {
          std::size_t b = a + 1;
          while (b < ranked.size() && ranked[b].first == ranked[a].first) ++b;
          for (std::size_t p = a; p < b; ++p) {
            for (std::size_t q = p + 1; q < b; ++q) {
              per_anchor[anchor].push_back({anchor, ranked[p].second, ranked[q].second});
            }
          }
          a = b;
        }
      }
    });
    for (auto& triples : per_anchor) {
      report.tie_triples.insert(report.tie_triples.end(), triples.begin(), triples.end());
    }
  }
  report.assumption_holds = report.duplicate_groups.empty() && report.tie_triples.empty();
  return report;
}

// Collapses each group of identical inputs into one row carrying the mean
// of the group's outputs. Surviving rows keep first-occurrence order.
inline Dataset resolve_duplicates(const Dataset& dataset) {
  const auto groups = detail::group_equal_inputs(dataset);
  if (groups.size() == dataset.size()) return dataset;
  Matrix x(groups.size(), dataset.input_dim());
  Matrix y(groups.size(), dataset.output_dim(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const PointView input = dataset.input(groups[g].front());
    std::copy(input.begin(), input.end(), x.row(g).begin());
    for (RowIndex r : groups[g]) {
      const PointView out = dataset.output(r);
      for (std::size_t m = 0; m < out.size(); ++m) y(g, m) += out[m];
    }
    for (std::size_t m = 0; m < dataset.output_dim(); ++m) y(g, m) /= static_cast<double>(groups[g].size());
  }
  return Dataset(std::move(x), std::move(y), dataset.feature_names(), dataset.target_names());
}

}  // namespace knnloo
