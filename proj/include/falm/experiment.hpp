#pragma once

// Batch experiments behind the `falm` command line: config parsing, run
// execution, CSV/JSON output and threshold checks.
//
// Config document:
//   {
//     "problem": GenSpec | inline Problem,
//     "runs": [{"label", "rule", "alpha"?, "m"?, "gamma"?, "sigma"?, "rho"?, "beta",
//               "max_iter", "record_every"?, "kkt_tol"?, "x_init"?, "lambda_init"?}],
//     "output_dir": path,
//     "rate_window"?: [k_min, k_max]
//   }
// "rule" is either a rule name with "alpha"/"m" alongside, or a nested rule
// document {"rule", "alpha"?}.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "falm/diagnostics.hpp"
#include "falm/problem_io.hpp"
#include "falm/solver.hpp"

namespace falm {

struct RunSpec {
  std::string label;
  SolverParams params;
  std::optional<Vector> x_init;
  std::optional<Vector> lambda_init;
};

struct ExperimentConfig {
  json problem;
  std::vector<RunSpec> runs;
  std::filesystem::path output_dir = "out";
  std::size_t window_lo = 100;
  std::size_t window_hi = 10000;
};

/// Throws InvalidArgument on malformed documents or duplicate labels.
ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// A materialized problem with its oracle saddle point when one is available.
struct Instance {
  std::shared_ptr<const Problem> problem;
  std::optional<SaddlePoint> star;
  json description;
};

Instance materialize(const json& problem_doc);

struct RunOutcome {
  std::string label;
  ValidatedConfig cfg;
  RunResult result;
  std::vector<RunRecord> records;
  std::vector<SeriesPoint> dual_bound;
  std::optional<std::size_t> anchor_k;
  std::optional<double> anchor_energy;
  CertReport cert;
};

/// Validates and runs one configuration, recording every record_every-th iterate.
RunOutcome execute(const Instance& inst, const RunSpec& spec);

/// Runs in parallel on up to `threads` threads (0: FALM_THREADS or the
/// OpenMP default). Outcomes keep config order. Validation errors propagate.
std::vector<RunOutcome> execute_all(const Instance& inst, std::span<const RunSpec> runs,
                                    int threads = 0);

/// Locale-independent, 17 significant digits, "\n" line endings.
std::string format_double(double v);
std::string records_csv(std::span<const RunRecord> records);

json summarize(const Instance& inst, const RunOutcome& out, std::size_t k_lo, std::size_t k_hi);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct CliOptions {
  /// Restrict to these labels when non-empty.
  std::vector<std::string> only;
  std::optional<std::filesystem::path> output_dir;
  int threads = 0;
};

/// Exit codes: 0 success, 1 run failure or violated threshold, 2 bad config
/// or failed validation.
int cmd_run(const std::filesystem::path& config, const CliOptions& opts, std::ostream& log);
int cmd_compare(const std::filesystem::path& config, const CliOptions& opts, std::ostream& log);
int cmd_ratecheck(const std::filesystem::path& config, const std::filesystem::path& thresholds,
                  const CliOptions& opts, std::ostream& log);

struct ThresholdResult {
  std::string label;
  std::string metric;
  bool passed = true;
  /// Offending k for pointwise checks, 0 otherwise.
  std::size_t k = 0;
  double value = 0.0;
  std::string detail;
};

/// Evaluates a thresholds document against finished runs.
///   {"thresholds": [{"metric", "label"?, "window"?, "max_slope"?, "min_slope"?,
///                    "min_r2"?, "tol"?, "max_ratio"?, "max"?}]}
/// metrics: gap | feas | obj_err | kkt_grad | kkt_feas (slope checks),
///   energy_monotone, gap_bound, feas_bound, kkt_decay, dual_bound, final_error.
std::vector<ThresholdResult> check_thresholds(const json& doc, const Instance& inst,
                                              std::span<const RunOutcome> outcomes,
                                              std::size_t k_lo, std::size_t k_hi);

}  // namespace falm
