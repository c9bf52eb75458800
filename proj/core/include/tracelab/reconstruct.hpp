#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tracelab/bits.hpp"

namespace tracelab {

enum class ReconStatus { Ok, CountMismatchFail, AllZeroFallback };

std::string_view to_string(ReconStatus status) noexcept;

struct ReconReport {
  Bits output;
  ReconStatus status = ReconStatus::Ok;
  std::size_t traces_used = 0;
  // Averaged length estimates (before division by p), one per output run.
  std::vector<double> estimates;
  // Named parameters the algorithm ran with (L, w, m, a, G_bar, ...).
  std::vector<std::pair<std::string, double>> thresholds;
  // Per-trace count of detected long runs / runs / windows.
  std::vector<std::size_t> per_trace_counts;
  std::string note;
};

/// Parameters shared by the gap reconstructors. make() derives everything
/// from (epsilon, C', q, n); tests that need q = 0 fill the fields directly.
struct GapParams {
  double epsilon = 0.25;
  double c_prime = 1.0;
  double q = 0.5;
  double p = 0.5;
  std::size_t n = 0;
  double log_n = 0;
  std::size_t T = 1;   // ceil(2 / (p^2 eps^2) log n)
  std::size_t L = 1;   // ceil(2 C' p log n)
  std::size_t m = 0;   // floor(eps C' log n)
  std::size_t a = 1;   // ceil(p C' log n)
  double g_bar = 0;    // 2 C' p log n

  static GapParams make(double epsilon, double c_prime, double q, std::size_t n);
};

enum class TraceVariant { LongRuns, Gap, Robust };

/// LONGRUNS: ceil(2 / (p eps^2) log n). GAP, ROBUST: ceil(2 / (p^2 eps^2) log n).
std::size_t trace_count(double epsilon, double p, double q, std::size_t n, TraceVariant variant);

/// Half-up rounding of a length estimate; nonzero estimates give at least 1.
std::size_t round_length(double estimate);

/// Run-by-run averaging. Fails unless all traces share the run count and
/// first value.
ReconReport recon_long_runs(const TraceSet& traces, double p);

/// recon_long_runs over the traces that attain the maximum run count.
ReconReport recon_long_runs_robust(const TraceSet& traces, std::size_t s, double p);

/// Single-trace reconstruction aligned on 0-runs of length at least
/// L = ceil(log n / (10 eps)).
ReconReport recon_one_runs(const Bits& trace, double epsilon, double p, double q, std::size_t n);
ReconReport recon_one_runs_with_threshold(const Bits& trace, std::size_t L, double p);

/// Aligns traces on 0-runs of length >= params.L and averages segment lengths.
ReconReport recon_gap(const TraceSet& traces, const GapParams& params);

enum class SStatKind { Interior, LBound, RBound, Undefined };

std::string_view to_string(SStatKind kind) noexcept;

struct SStatResult {
  std::size_t value = 0;            // zeros counted
  std::optional<std::size_t> i_ell; // (m+1)-th 1 left of ell
  std::optional<std::size_t> j_ell; // (m+1)-th 1 right of ell
  SStatKind kind = SStatKind::Undefined;
};

/// Zero count between the (m+1)-th 1 on each side of ell; boundary forms
/// count to the trace ends. Throws std::invalid_argument unless trace[ell] == 0.
SStatResult s_statistic(const Bits& trace, std::size_t ell, std::size_t m);

/// Dense-substring reconstruction for strings that are a few flips away from
/// a gap-class string. Throws std::invalid_argument if a <= 3m.
ReconReport recon_gap_robust(const TraceSet& traces, const GapParams& params);

/// Window-majority reconstruction from one trace with
/// L = ceil(50 log n / (p^2 eps^2)) and w = max(1, round(eps p L)).
ReconReport recon_majority(const Bits& trace, double epsilon, double p, double q, std::size_t n);
ReconReport recon_majority_window(const Bits& trace, std::size_t w, double p);

/// Smallest C' on the grid 1.1^k in [c_floor, n / log n] whose trace-domain
/// gap (ceil(C' p log n), floor(3 C' p log n)) holds no pooled 0-run length
/// and whose 1-run scale (p/2) C' log n / eps is below every trace 1-run.
/// c_floor defaults to 100 / p.
std::optional<double> estimate_gap_constant(const TraceSet& traces, double epsilon, double p, double q, std::size_t n,
                                            std::optional<double> c_floor = std::nullopt);

}  // namespace tracelab
