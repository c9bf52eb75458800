#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/classes.hpp"
#include "tracelab/reconstruct.hpp"

namespace tracelab {

enum class Algo { LongRuns, LongRunsRobust, OneRuns, Gap, GapRobust, Majority };

/// CLI names: longruns, longruns-robust, oneruns, gap, gap-robust, majority.
std::string_view to_string(Algo algo) noexcept;
std::optional<Algo> parse_algo(std::string_view name) noexcept;

struct ExperimentConfig {
  ClassSpec cls;  // cls.seed is ignored; each trial derives its own
  Algo algo = Algo::Gap;
  double q = 0.5;
  std::size_t trials = 100;
  std::optional<std::size_t> trace_override;  // nullopt: use the formula
  std::optional<double> recon_c_prime;         // C' handed to the gap reconstructors; default cls.c_prime
  std::uint64_t master_seed = 0;
  bool timing = true;             // false writes wall_ms = 0 for byte-stable output
  bool allow_unchecked_q = false; // permits q outside [0.05, 0.95] (tests)

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

/// Everything derived from a config before sampling.
struct DerivedParams {
  std::size_t T = 1;
  std::optional<GapParams> gap;      // gap / gap-robust
  std::optional<std::size_t> one_runs_L;
  std::optional<std::size_t> majority_L;
  std::optional<std::size_t> majority_w;
  ClassThresholds thresholds;
};

DerivedParams derive_params(const ExperimentConfig& cfg);

struct TrialRecord {
  std::size_t cell_id = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t traces_used = 0;
  std::string status;  // a ReconStatus name, or ERROR
  std::size_t edit_distance = 0;
  double normalized_error = 0;
  double wall_ms = 0;
  bool success = false;
  std::string message;
};

/// generate -> corrupt -> reconstruct -> verify, deterministic in
/// (cfg, cell_id, trial). Module errors become an ERROR record.
TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t cell_id, std::size_t trial);

/// Distance used for verification: banded with band 2 ceil(eps n), exact
/// when the band is exceeded.
std::size_t verify_distance(const Bits& output, const Bits& source, double epsilon);

struct SweepGrid {
  ExperimentConfig base;
  std::vector<std::size_t> n;
  std::vector<double> epsilon;
  std::vector<std::optional<std::size_t>> T;  // nullopt entry: formula
  std::vector<double> q;
  std::vector<Algo> algo;

  /// Cross product in axis order n, epsilon, T, q, algo (algo fastest).
  std::vector<ExperimentConfig> cells() const;
};

struct SweepResult {
  std::vector<ExperimentConfig> cells;
  std::vector<TrialRecord> rows;  // sorted by (cell_id, trial)
  bool class_known = true;        // false when rebuilt from CSV
};

/// Runs every (cell, trial) on up to `workers` threads (0: hardware
/// concurrency). Output does not depend on the worker count.
SweepResult run_sweep(const SweepGrid& grid, unsigned workers = 0);
SweepResult run_cells(const std::vector<ExperimentConfig>& cells, unsigned workers = 0);

struct CellSummary {
  std::size_t cell_id = 0;
  std::string class_name;
  std::string algo;
  std::size_t n = 0;
  double epsilon = 0;
  double q = 0;
  std::size_t T = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0;
  double ci_half_width = 0;
  double mean_error = 0;
  double max_error = 0;
  std::map<std::string, std::size_t> status_counts;
};

struct Summary {
  std::vector<CellSummary> cells;
  std::vector<std::string> warnings;
};

Summary summarize(const SweepResult& result);

inline constexpr std::string_view kCsvHeader =
    "cell_id,n,epsilon,q,algo,T,trial,seed,status,edit_distance,normalized_error,wall_ms";

void write_csv(std::ostream& os, const SweepResult& result);

/// Reads rows written by write_csv. Throws std::runtime_error on a bad header or row.
SweepResult read_csv(std::istream& is);

/// JSON: resolved configs with derived parameters plus the summary.
std::string summary_json(const SweepResult& result, const Summary& summary);
std::string config_json(const ExperimentConfig& cfg);

/// Parses a sweep config document. Scalars and arrays are both accepted for
/// the grid axes; "T" may be "formula" or an integer. Throws std::invalid_argument.
struct SweepFile {
  SweepGrid grid;
  std::string csv_path;
  std::string summary_path;
  unsigned workers = 0;
};
SweepFile parse_sweep_config(std::string_view json_text);

/// TRACELAB_SEED, when set to an unsigned integer, replaces `configured`.
std::uint64_t resolve_master_seed(std::uint64_t configured);

}  // namespace tracelab
