#pragma once

// Command-line front end. Kept header-only so tests can drive every command
// in-process; tools/knnloo.cpp is a thin main() around run().

#include <CLI11.hpp>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "knnloo/bench.hpp"
#include "knnloo/data.hpp"
#include "knnloo/dataset.hpp"
#include "knnloo/detail/format.hpp"
#include "knnloo/error.hpp"
#include "knnloo/loocv.hpp"
#include "knnloo/synth.hpp"

namespace knnloo::cli {

enum ExitCode : int {
  kOk = 0,
  kAssumptionViolated = 1,
  kConfigError = 2,
  kDataError = 3,
  kCorrectnessFailure = 4,
};

enum class OutputFormat { Csv, Json };

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::string command;
  std::string data_path;
  std::vector<std::string> targets;
  std::vector<std::string> features;
  std::optional<std::size_t> k_min;
  std::optional<std::size_t> k_max;
  SweepMethod method = SweepMethod::Both;
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  bool standardize = true;
  unsigned threads = 1;
  char delimiter = ',';
  // bench
  std::vector<std::size_t> sizes{500, 1000, 2000, 4000, 8000};
  std::size_t bench_k = 5;
  // synth (bench reuses dim and noise)
  std::size_t synth_n = 200;
  std::size_t dim = 3;
  std::size_t outputs = 1;
  double noise = 0.1;
};

inline int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::KTooLarge:
    case Errc::EmptySweep:
    case Errc::InvalidArgument:
      return kConfigError;
    default:
      return kDataError;
  }
}

// ---------------------------------------------------------------------------
// Table rendering
// ---------------------------------------------------------------------------

inline std::string render_sweep(const SweepResult& sweep, OutputFormat format) {
  const bool both = !sweep.discrepancy.empty();
  std::vector<const LoocvResult*> records;
  const std::size_t count = std::max(sweep.brute.size(), sweep.efficient.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (i < sweep.brute.size()) records.push_back(&sweep.brute[i]);
    if (i < sweep.efficient.size()) records.push_back(&sweep.efficient[i]);
  }
  auto discrepancy_of = [&](const LoocvResult& r) -> const Discrepancy& {
    return sweep.discrepancy[r.k - sweep.discrepancy.front().k];
  };

  if (format == OutputFormat::Json) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "sweep";
    nlohmann::ordered_json best = nlohmann::ordered_json::object();
    if (sweep.best_k_brute) best["brute"] = *sweep.best_k_brute;
    if (sweep.best_k_efficient) best["efficient"] = *sweep.best_k_efficient;
    doc["best_k"] = best;
    doc["records"] = nlohmann::ordered_json::array();
    for (const LoocvResult* r : records) {
      nlohmann::ordered_json rec;
      rec["k"] = r->k;
      rec["method"] = std::string(to_string(r->method));
      rec["score"] = r->score;
      rec["fit_count"] = r->fit_count;
      if (both) {
        rec["abs_discrepancy"] = discrepancy_of(*r).absolute;
        rec["rel_discrepancy"] = discrepancy_of(*r).relative;
      }
      doc["records"].push_back(std::move(rec));
    }
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "k,method,score,fit_count";
  if (both) out << ",abs_discrepancy,rel_discrepancy";
  out << '\n';
  for (const LoocvResult* r : records) {
    out << r->k << ',' << to_string(r->method) << ',' << detail::format_double(r->score) << ',' << r->fit_count;
    if (both) {
      out << ',' << detail::format_double(discrepancy_of(*r).absolute) << ','
          << detail::format_double(discrepancy_of(*r).relative);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string render_bench(const std::vector<BenchRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "bench";
    doc["records"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      doc["records"].push_back(
          {{"n", row.n}, {"method", row.method}, {"seconds", row.seconds}, {"fit_count", row.fit_count}});
    }
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "n,method,seconds,fit_count\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.method << ',' << detail::format_double(row.seconds) << ',' << row.fit_count << '\n';
  }
  return out.str();
}

inline std::string render_ties(const TieReport& report, std::size_t n, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["command"] = "diagnose";
    doc["n"] = n;
    doc["assumption_holds"] = report.assumption_holds;
    doc["triples_evaluated"] = report.triples_evaluated;
    doc["duplicate_groups"] = report.duplicate_groups;
    doc["tie_triple_count"] = report.tie_triples.size();
    auto triples = nlohmann::ordered_json::array();
    for (const auto& t : report.tie_triples) triples.push_back({t.anchor, t.first, t.second});
    doc["tie_triples"] = std::move(triples);
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "kind,rows\n";
  for (const auto& group : report.duplicate_groups) {
    out << "duplicate,";
    for (std::size_t i = 0; i < group.size(); ++i) out << (i ? " " : "") << group[i];
    out << '\n';
  }
  for (const auto& t : report.tie_triples) out << "tie," << t.anchor << ' ' << t.first << ' ' << t.second << '\n';
  return out.str();
}

inline void summarize_ties(const TieReport& report, std::ostream& out) {
  constexpr std::size_t kShown = 5;
  out << "assumption holds: " << (report.assumption_holds ? "yes" : "no") << '\n';
  out << "duplicate groups: " << report.duplicate_groups.size() << '\n';
  for (std::size_t g = 0; g < std::min(kShown, report.duplicate_groups.size()); ++g) {
    out << "  rows";
    for (RowIndex r : report.duplicate_groups[g]) out << ' ' << r;
    out << '\n';
  }
  if (report.duplicate_groups.size() > kShown) out << "  ...\n";
  if (report.triples_evaluated) {
    out << "distance-tie triples: " << report.tie_triples.size() << '\n';
  } else {
    out << "distance-tie triples: not evaluated (dataset above size cap)\n";
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline void write_output(const RunConfig& config, const std::string& content, std::ostream& out) {
  if (config.out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(config.out_path, std::ios::binary);
  if (!file) throw Error(Errc::IoError, "cannot open '" + config.out_path + "' for writing");
  file << content;
  if (!file) throw Error(Errc::IoError, "failed writing '" + config.out_path + "'");
}

inline Dataset load_raw(const RunConfig& config) {
  if (config.data_path.empty()) throw Error(Errc::InvalidArgument, "--data is required");
  if (config.targets.empty()) throw Error(Errc::InvalidArgument, "--target is required");
  return load_csv(config.data_path, config.targets, config.features, {config.delimiter});
}

inline Dataset load_prepared(const RunConfig& config) {
  Dataset data = load_raw(config);
  return config.standardize ? standardize(data).dataset : data;
}

struct KRange {
  std::size_t min;
  std::size_t max;
};

inline KRange resolve_k_range(const RunConfig& config, std::size_t n) {
  if (n < 2) throw Error(Errc::DatasetTooSmall, "leave-one-out needs at least 2 rows, got " + std::to_string(n));
  const KRange range{config.k_min.value_or(1), config.k_max.value_or(default_k_max(n))};
  if (range.min == 0) throw Error(Errc::InvalidArgument, "--k-min must be at least 1");
  if (range.max > n - 1) {
    throw Error(Errc::KTooLarge, "--k-max = " + std::to_string(range.max) + " but the dataset allows at most n - 1 = " +
                                     std::to_string(n - 1));
  }
  if (range.min > range.max) throw Error(Errc::InvalidArgument, "--k-min exceeds --k-max");
  return range;
}

inline void print_best_k(const SweepResult& sweep, std::ostream& out) {
  if (sweep.best_k_brute) out << "best_k brute: " << *sweep.best_k_brute << '\n';
  if (sweep.best_k_efficient) out << "best_k efficient: " << *sweep.best_k_efficient << '\n';
  if (!sweep.discrepancy.empty()) {
    out << "max relative discrepancy: " << detail::format_double(sweep.max_relative_discrepancy()) << '\n';
  }
}

inline int cmd_sweep(const RunConfig& config, std::ostream& out, const SweepScorers& scorers = {}) {
  const Dataset data = load_prepared(config);
  const KRange range = resolve_k_range(config, data.size());
  const SweepResult sweep = loocv_sweep(data, range.min, range.max, config.method, {config.threads}, scorers);
  write_output(config, render_sweep(sweep, config.format), out);
  print_best_k(sweep, out);
  return kOk;
}

struct ValidateOutcome {
  int exit_code = kOk;
  double max_relative = 0.0;
  TieReport ties;
  SweepResult sweep;
};

// Exit 0 when the two routes agree and the data is tie-free, 1 when the data
// violates the tie-free condition (disagreement is then allowed), and 4 when
// the data is tie-free yet the routes disagree.
inline ValidateOutcome validate(const Dataset& data, KRange range, double tolerance, const LoocvOptions& options,
                                const SweepScorers& scorers = {}) {
  ValidateOutcome outcome;
  outcome.sweep = loocv_sweep(data, range.min, range.max, SweepMethod::Both, options, scorers);
  outcome.max_relative = outcome.sweep.max_relative_discrepancy();
  outcome.ties = detect_ties(data, {.threads = options.threads});
  if (!outcome.ties.assumption_holds) {
    outcome.exit_code = kAssumptionViolated;
  } else if (!(outcome.max_relative <= tolerance)) {
    outcome.exit_code = kCorrectnessFailure;
  } else {
    outcome.exit_code = kOk;
  }
  return outcome;
}

inline int cmd_validate(const RunConfig& config, std::ostream& out, const SweepScorers& scorers = {}) {
  const Dataset data = load_prepared(config);
  const KRange range = resolve_k_range(config, data.size());
  const ValidateOutcome outcome = validate(data, range, config.tolerance, {config.threads}, scorers);
  if (!config.out_path.empty()) write_output(config, render_sweep(outcome.sweep, config.format), out);
  out << "k range: [" << range.min << ", " << range.max << "]\n";
  out << "max relative discrepancy: " << detail::format_double(outcome.max_relative)
      << " (tolerance " << detail::format_double(config.tolerance) << ")\n";
  summarize_ties(outcome.ties, out);
  switch (outcome.exit_code) {
    case kOk:
      out << "result: brute and efficient LOOCV agree\n";
      break;
    case kAssumptionViolated:
      out << "result: tie-free condition violated; efficient LOOCV is not guaranteed exact\n";
      break;
    default:
      out << "result: FAILURE, scores diverge on tie-free data\n";
      break;
  }
  return outcome.exit_code;
}

inline int cmd_bench(const RunConfig& config, std::ostream& out) {
  BenchConfig bench;
  bench.sizes = config.sizes;
  bench.k = config.bench_k;
  bench.repetitions = config.repetitions;
  bench.input_dim = config.dim;
  bench.noise = config.noise;
  bench.seed = config.seed;
  bench.options.threads = config.threads;
  std::optional<Dataset> source;
  if (!config.data_path.empty()) {
    source = load_prepared(config);
    bench.source = &*source;
  }
  write_output(config, render_bench(run_bench(bench), config.format), out);
  if (!config.out_path.empty()) out << "wrote " << config.out_path << '\n';
  return kOk;
}

inline int cmd_diagnose(const RunConfig& config, std::ostream& out) {
  const Dataset data = load_prepared(config);
  const TieReport report = detect_ties(data, {.threads = config.threads});
  if (!config.out_path.empty()) write_output(config, render_ties(report, data.size(), config.format), out);
  out << "rows: " << data.size() << '\n';
  summarize_ties(report, out);
  return report.assumption_holds ? kOk : kAssumptionViolated;
}

// Deduplicates in the file's own units; standardization does not apply.
inline int cmd_dedupe(const RunConfig& config, std::ostream& out) {
  const Dataset data = load_raw(config);
  const Dataset resolved = resolve_duplicates(data);
  std::ostringstream csv;
  write_csv(resolved, csv, {config.delimiter});
  write_output(config, csv.str(), out);
  if (!config.out_path.empty()) {
    out << "rows: " << data.size() << " -> " << resolved.size() << '\n';
  }
  return kOk;
}

inline int cmd_synth(const RunConfig& config, std::ostream& out) {
  const Dataset data = synthesize({config.synth_n, config.dim, config.outputs, config.noise, config.seed});
  std::ostringstream csv;
  write_csv(data, csv, {config.delimiter});
  write_output(config, csv.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const SweepScorers& scorers = {}) {
  CLI::App app{"Exact leave-one-out cross-validation for k-NN regression"};
  app.require_subcommand(1);
  RunConfig config;
  std::string method = "both";
  std::string format = "csv";
  std::string delimiter = ",";
  std::size_t k_min = 0;
  std::size_t k_max = 0;

  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--data", config.data_path, "input CSV file")->required();
    cmd->add_option("--target", config.targets, "target column(s)")->required()->delimiter(',');
    cmd->add_option("--features", config.features, "feature columns (default: all non-target)")->delimiter(',');
    cmd->add_option("--delimiter", delimiter, "CSV delimiter");
    cmd->add_flag("--standardize,!--no-standardize", config.standardize,
                  "standardize features to mean 0, variance 1 (default on)");
  };
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", config.out_path, "output file (default: stdout)");
    cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_threads = [&](CLI::App* cmd) {
    cmd->add_option("--threads", config.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  };
  auto add_k_range = [&](CLI::App* cmd) {
    cmd->add_option("--k-min", k_min, "smallest k (default 1)")->check(CLI::PositiveNumber);
    cmd->add_option("--k-max", k_max, "largest k (default min(50, n-1))")->check(CLI::PositiveNumber);
  };

  auto* sweep = app.add_subcommand("sweep", "LOOCV score for each k in a range");
  add_data(sweep);
  add_k_range(sweep);
  sweep->add_option("--method", method, "brute, efficient or both")
      ->check(CLI::IsMember({"brute", "efficient", "both"}));
  add_output(sweep);
  add_threads(sweep);

  auto* validate_cmd = app.add_subcommand("validate", "check brute and efficient LOOCV agree");
  add_data(validate_cmd);
  add_k_range(validate_cmd);
  validate_cmd->add_option("--tolerance", config.tolerance, "max relative discrepancy")->check(CLI::NonNegativeNumber);
  add_output(validate_cmd);
  add_threads(validate_cmd);

  auto* bench = app.add_subcommand("bench", "time the LOOCV routes over dataset sizes");
  bench->add_option("--data", config.data_path, "use the first n rows of this CSV instead of synthetic data");
  bench->add_option("--target", config.targets, "target column(s) for --data")->delimiter(',');
  bench->add_option("--features", config.features, "feature columns for --data")->delimiter(',');
  bench->add_option("--delimiter", delimiter, "CSV delimiter");
  bench->add_flag("--standardize,!--no-standardize", config.standardize, "standardize --data features");
  bench->add_option("--sizes", config.sizes, "dataset sizes")->delimiter(',');
  bench->add_option("--k", config.bench_k, "neighbour count")->check(CLI::PositiveNumber);
  bench->add_option("--reps", config.repetitions, "repetitions per timing (median reported)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--dim", config.dim, "synthetic input dimension")->check(CLI::PositiveNumber);
  bench->add_option("--noise", config.noise, "synthetic noise level")->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", config.seed, "synthetic data seed");
  add_output(bench);
  add_threads(bench);

  auto* diagnose = app.add_subcommand("diagnose", "report duplicate inputs and distance ties");
  add_data(diagnose);
  add_output(diagnose);
  add_threads(diagnose);

  auto* dedupe = app.add_subcommand("dedupe", "average outputs over duplicate inputs");
  dedupe->add_option("--data", config.data_path, "input CSV file")->required();
  dedupe->add_option("--target", config.targets, "target column(s)")->required()->delimiter(',');
  dedupe->add_option("--features", config.features, "feature columns")->delimiter(',');
  dedupe->add_option("--delimiter", delimiter, "CSV delimiter");
  dedupe->add_option("--out", config.out_path, "output CSV (default: stdout)");

  auto* synth = app.add_subcommand("synth", "write a seeded synthetic regression dataset");
  synth->add_option("--n", config.synth_n, "rows")->check(CLI::PositiveNumber);
  synth->add_option("--dim", config.dim, "input dimension")->check(CLI::PositiveNumber);
  synth->add_option("--outputs", config.outputs, "output dimension")->check(CLI::PositiveNumber);
  synth->add_option("--noise", config.noise, "Gaussian noise standard deviation")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", config.seed, "random seed");
  synth->add_option("--out", config.out_path, "output CSV (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  if (delimiter.size() != 1) {
    err << "error: --delimiter must be a single character\n";
    return kConfigError;
  }
  config.delimiter = delimiter.front();
  config.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  config.method = method == "brute" ? SweepMethod::Brute
                  : method == "efficient" ? SweepMethod::Efficient
                                          : SweepMethod::Both;
  if (k_min != 0) config.k_min = k_min;
  if (k_max != 0) config.k_max = k_max;

  try {
    if (sweep->parsed()) return cmd_sweep(config, out, scorers);
    if (validate_cmd->parsed()) return cmd_validate(config, out, scorers);
    if (bench->parsed()) return cmd_bench(config, out);
    if (diagnose->parsed()) return cmd_diagnose(config, out);
    if (dedupe->parsed()) return cmd_dedupe(config, out);
    if (synth->parsed()) return cmd_synth(config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kConfigError;
}

}  // namespace knnloo::cli
