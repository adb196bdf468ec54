#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causelab/oracle.hpp"
#include "causelab/proxy_id.hpp"
#include "causelab/scm.hpp"

namespace causelab {

inline constexpr const char* kOutputDirEnv = "CAUSELAB_OUT";
inline constexpr const char* kCsvSchemaLine = "# schema=1";

struct GridSpec {
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
};

// One experiment: a world, queries against it, the estimators to run on each,
// and the (n, seed) grid. `partition` is needed by proxy_id, `k` by the
// substitute-confounder methods.
struct ExperimentConfig {
  ScmSpec scm;
  std::vector<InterventionQuery> queries;
  std::vector<std::string> methods;
  GridSpec grid;
  int k = 1;
  std::optional<CausePartition> partition;
  std::string output;
};

extern const std::vector<std::string> kKnownMethods;

// Structural checks only (fields present, names known, grid non-empty,
// method prerequisites satisfied); raises ConfigError naming the field.
void validate_config(const ExperimentConfig& config);

// Canonical content hash; every cell's RNG stream is derived from it.
std::uint64_t config_hash(const ExperimentConfig& config);

struct CellResult {
  std::size_t cell = 0;
  std::string method;
  std::string query;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double se = 0.0;
  std::string status;  // "ok" or the error code
  std::string detail;  // diagnostics (residuals, check scores) or the error message
};

struct ReportBundle {
  std::uint64_t hash = 0;
  std::vector<CellResult> cells;
  bool all_ok = true;
};

std::string format_query(const InterventionQuery& q);

// Executes every (n, seed, query, method) cell. Cells are independent; with
// jobs > 1 they run on a thread pool but land in a fixed slot, so the bundle
// is identical for identical configs regardless of schedule. A failing cell
// records its error and clears all_ok instead of aborting the run.
ReportBundle run(const ExperimentConfig& config, int jobs = 1);

std::string results_csv(const ReportBundle& bundle);
std::string summary_json(const ExperimentConfig& config, const ReportBundle& bundle);

// Writes results.csv and summary.json under out_dir (created if needed).
void write_reports(const ExperimentConfig& config, const ReportBundle& bundle,
                   const std::string& out_dir);

struct Verdict {
  bool pass = false;
  double worst_error = 0.0;
  std::size_t cells_compared = 0;
};

// Worst |test - baseline| over the (query, n, seed) cells both methods
// completed, against the tolerance. Raises MissingMethod if either method has
// no completed cell.
Verdict compare(const ReportBundle& bundle, const std::string& baseline_method,
                const std::string& test_method, double tolerance);

}  // namespace causelab
