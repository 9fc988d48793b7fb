#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvwit/partitions.hpp"
#include "cvwit/witness.hpp"

namespace cvwit {

// Invalid or inconsistent experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  structure_scan,    // certificate rate per hypothesized structure
  full_insep_scan,   // single-block structure, rate per order
  loss_sweep,        // full inseparability under per-mode loss, rate per eta
  spdc_scan,         // three-mode SPDC states, rate per order
  baseline_compare,  // full_insep_scan plus the van Loock baseline
};

ExperimentKind experiment_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

// Declarative experiment description. JSON keys mirror the field names;
// "N", "d" and "samples" are accepted as aliases. Unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::full_insep_scan;
  int num_modes = 3;
  int cutoff = 0;  // 0 -> default_cutoff(num_modes)
  int stellar_rank = 2;
  std::vector<int> orders = {1, 2};
  std::vector<Partition> structures;  // empty -> experiment default
  int sample_count = 200;
  std::uint64_t seed = 12345;
  std::vector<double> loss_grid;  // required for loss_sweep
  double chi_max = 0.04;          // spdc_scan coupling range
  std::string out = "run";        // path prefix: <out>.jsonl, <out>.summary.csv
  int max_resamples = 200;
  double cert_rel = tol::certification_rel;
  bool van_loock = false;  // forced on for loss_sweep / baseline_compare
  int degenerate_budget = 0;  // tolerated generation failures (exit 3 beyond)

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
  std::string hash() const;  // FNV-1a over the canonical JSON dump
  void validate() const;     // throws ConfigError
};

// One Young-class representative per class with at least one block of
// size >= 2 (contiguous blocks, descending sizes).
std::vector<Partition> default_structures(int num_modes);

struct SummaryRow {
  std::string cell;       // "structure=[[0,1],[2],[3]]", "eta=0.9", "spdc"
  std::string criterion;  // "order1".."order4", "van_loock"
  int samples = 0;
  int detections = 0;
  int degenerate = 0;  // generation failures in this cell
  double rate = 0.0;
  double std10 = 0.0;  // sample std of the 10-batch rates
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
};

struct RunResult {
  SummaryTable summary;
  int degenerate_states = 0;
  std::string records_path;
  std::string summary_path;
};

// Runs every cell of the experiment, appending one JSONL RunRecord per state
// to <out>.jsonl and the summary to <out>.summary.csv. Deterministic for a
// fixed config apart from the wall_time_ms record field. States that exhaust
// the resample budget are recorded as degenerate and skipped; the run
// continues.
RunResult run_experiment(const ExperimentConfig& cfg);

struct ReportResult {
  int records = 0;
  int skipped = 0;  // corrupt lines
  std::string rates_path;    // <out>.rates.csv
  std::string scatter_path;  // <out>.scatter.csv (per-state index vs g)
};

// Recomputes rate tables from persisted records and emits plot data.
ReportResult report_records(const std::string& records_path,
                            const std::string& out_prefix);

}  // namespace cvwit
