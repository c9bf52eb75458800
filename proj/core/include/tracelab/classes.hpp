#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tracelab/bits.hpp"

namespace tracelab {

enum class ClassKind { AllLongRuns, LongOneRuns, GapClass, PerturbedGap, DenseIntervals, Random };

std::string_view to_string(ClassKind kind) noexcept;
/// Accepts the upper-case names (ALL_LONG_RUNS, GAP_CLASS, ...).
std::optional<ClassKind> parse_class_kind(std::string_view name) noexcept;

/// log_{1/q}(n). Values within 1e-9 of an integer are snapped to it so that
/// thresholds such as ceil(5 log n) do not pick up floating-point noise.
double log_inv_q(double n, double q);

/// Ceiling and floor that ignore a relative error of 1e-9.
std::size_t ceil_tolerant(double v);
std::size_t floor_tolerant(double v);

struct ClassSpec {
  ClassKind kind = ClassKind::Random;
  std::size_t n = 0;
  double epsilon = 0.25;
  double c_prime = 1.0;
  double q = 0.5;
  std::uint64_t seed = 0;

  // ALL_LONG_RUNS: number of runs allowed below the length threshold.
  std::size_t short_runs = 0;
  // GAP_CLASS / PERTURBED_GAP: probability that a 0-run is drawn long.
  double long_zero_fraction = 0.5;
  // GAP_CLASS / PERTURBED_GAP: permit the string to open with a 0-run.
  bool leading_zero_run = false;
  // PERTURBED_GAP: flip the first m bits of each run instead of a random subset.
  bool adversarial_flips = false;
  // DENSE_INTERVALS: alternate interval majorities (else draw each one).
  bool alternate_majority = true;
};

/// Every integer threshold a spec implies. Fields irrelevant to the spec's
/// kind are still filled in.
struct ClassThresholds {
  double log_n = 0;
  std::size_t min_run = 0;         // ALL_LONG_RUNS: ceil(5 log n)
  std::size_t min_one_run = 0;     // LONG_ONE_RUNS: ceil(C' log n / eps^2); GAP: ceil(C' log n / eps)
  std::size_t short_zero_max = 0;  // ceil(C' log n) - 1
  std::size_t long_zero_min = 0;   // ceil(3 C' log n) + 1
  std::size_t flip_budget = 0;     // floor(eps C' log n)
  std::size_t min_interval = 0;    // ceil(C' log n / eps^2)
  double density_floor = 0;        // 1 - eps / 12, closed
};

ClassThresholds class_thresholds(const ClassSpec& spec);

struct Interval {
  std::size_t begin = 0;
  std::size_t length = 0;
  bool majority = false;
  std::size_t minority = 0;
};

/// Positions flipped in each run of the unperturbed base string.
struct FlipLog {
  Bits base;
  std::vector<std::vector<std::size_t>> per_run;
};

enum class PairMember : std::uint8_t { A, B };

struct BlockTruth {
  std::size_t block_length = 0;
  std::vector<PairMember> choices;
  std::size_t remainder = 0;  // trailing zero fill
};

struct ClassMetadata {
  std::vector<Interval> intervals;
  std::optional<FlipLog> flips;
  std::optional<BlockTruth> blocks;
};

struct Generated {
  Bits bits;
  ClassMetadata meta;
};

// Generators. Each is deterministic in (spec, spec.seed) and throws
// std::invalid_argument when the spec is infeasible.
Generated gen_all_long_runs(const ClassSpec& spec);
Generated gen_long_one_runs(const ClassSpec& spec);
Generated gen_gap_class(const ClassSpec& spec);
Generated gen_dense_intervals(const ClassSpec& spec);
Generated gen_random(const ClassSpec& spec);

/// Flips up to m = floor(eps C' log n) bits inside every run of y, a uniform
/// count in [0, m] at uniform positions (or the first m bits in adversarial
/// mode). The result's metadata carries y and the flip log.
Generated perturb_runs(const Bits& y, const ClassSpec& spec);

/// A GAP_CLASS base string passed through perturb_runs.
Generated gen_perturbed_gap(const ClassSpec& spec);

/// Dispatches on spec.kind.
Generated generate(const ClassSpec& spec);

/// (01)^k 1 (01)^{k+1} and (01)^{k+1} 1 (01)^k, each of length 4k + 3.
std::pair<Bits, Bits> gen_hard_pair(std::size_t k);

/// 0^k (01)^k 0^{k+1} and 0^{k+1} (01)^k 0^k, each of length 4k + 1.
std::pair<Bits, Bits> gen_hamming_pair(std::size_t k);

/// Largest k >= 1 with 4k + 3 <= ceil(1 / (128 eps)).
std::size_t block_pair_k(double epsilon);

/// Concatenation of floor(n / L) independent uniform hard-pair blocks of
/// length L = 4k + 3 (k from block_pair_k), zero-filled to length n.
Generated gen_block_concat(std::size_t n, double epsilon, std::uint64_t seed);

struct ClassDiagnostics {
  bool ok = true;
  std::string message;
  std::optional<std::size_t> violating_index;  // run or interval index
};

/// Checks the premises of spec.kind on x. PERTURBED_GAP needs the flip log;
/// DENSE_INTERVALS uses the interval layout when given, otherwise it
/// searches for one (quadratic in |x|).
ClassDiagnostics validate_class(const Bits& x, const ClassSpec& spec, const ClassMetadata* meta = nullptr);

}  // namespace tracelab
