#include "tracelab/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tracelab/classes.hpp"

namespace tracelab {

namespace {

void require_traces(const TraceSet& traces, const char* who) {
  if (traces.empty()) throw std::invalid_argument(std::string(who) + ": empty trace set");
}

void require_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("retention probability p must lie in (0, 1]");
}

// Segments of a trace around its 0-runs of length >= L:
// ones[0], zeros[0], ones[1], ..., zeros[k-1], ones[k].
struct Alignment {
  std::vector<std::size_t> ones;
  std::vector<std::size_t> zeros;
};

Alignment align_on_long_zero_runs(const Bits& trace, std::size_t L) {
  Alignment al;
  const RunSeq rs = runs(trace);
  std::size_t segment = 0;
  for (std::size_t i = 0; i < rs.count(); ++i) {
    const std::size_t len = rs.lengths[i];
    if (!rs.value_of(i) && len >= L) {
      al.ones.push_back(segment);
      al.zeros.push_back(len);
      segment = 0;
    } else {
      segment += len;
    }
  }
  al.ones.push_back(segment);
  return al;
}

ReconReport assemble_alternating(const std::vector<double>& one_means, const std::vector<double>& zero_means, double p) {
  ReconReport rep;
  for (std::size_t i = 0; i < one_means.size(); ++i) {
    rep.output.append(true, round_length(one_means[i] / p));
    rep.estimates.push_back(one_means[i]);
    if (i < zero_means.size()) {
      rep.output.append(false, round_length(zero_means[i] / p));
      rep.estimates.push_back(zero_means[i]);
    }
  }
  return rep;
}

double mean_length(const TraceSet& traces) {
  double total = 0;
  for (const auto& t : traces) total += static_cast<double>(t.size());
  return total / static_cast<double>(traces.size());
}

// Ones positions and zero prefix counts of one trace.
class TraceIndex {
 public:
  explicit TraceIndex(const Bits& trace) : size_(trace.size()), zeros_before_(trace.size() + 1, 0) {
    for (std::size_t k = 0; k < size_; ++k) {
      const bool bit = trace[k];
      zeros_before_[k + 1] = zeros_before_[k] + (bit ? 0 : 1);
      if (bit) ones_.push_back(k);
    }
  }

  std::size_t size() const { return size_; }

  // Zeros in [lo, hi], both inclusive and clamped to the trace.
  std::size_t zeros_in(std::size_t lo, std::size_t hi) const {
    if (size_ == 0 || lo >= size_) return 0;
    hi = std::min(hi, size_ - 1);
    if (hi < lo) return 0;
    return zeros_before_[hi + 1] - zeros_before_[lo];
  }

  bool is_zero(std::size_t k) const { return zeros_before_[k + 1] != zeros_before_[k]; }

  // Index of the first zero at or after `from`, or size() if none.
  std::size_t next_zero(std::size_t from) const {
    if (from >= size_) return size_;
    const std::size_t target = zeros_before_[from] + 1;
    auto it = std::lower_bound(zeros_before_.begin() + static_cast<std::ptrdiff_t>(from) + 1, zeros_before_.end(), target);
    if (it == zeros_before_.end()) return size_;
    return static_cast<std::size_t>(it - zeros_before_.begin()) - 1;
  }

  // The r-th zero (1-based) counting from position `from`, or size().
  std::size_t nth_zero_from(std::size_t from, std::size_t r) const {
    if (from >= size_) return size_;
    const std::size_t target = zeros_before_[from] + r;
    auto it = std::lower_bound(zeros_before_.begin() + static_cast<std::ptrdiff_t>(from) + 1, zeros_before_.end(), target);
    if (it == zeros_before_.end()) return size_;
    return static_cast<std::size_t>(it - zeros_before_.begin()) - 1;
  }

  SStatResult stat(std::size_t ell, std::size_t m) const {
    SStatResult r;
    const auto right = std::upper_bound(ones_.begin(), ones_.end(), ell);
    const auto left_count = static_cast<std::size_t>(right - ones_.begin());
    const auto right_count = static_cast<std::size_t>(ones_.end() - right);
    if (left_count >= m + 1) r.i_ell = ones_[left_count - (m + 1)];
    if (right_count >= m + 1) r.j_ell = *(right + static_cast<std::ptrdiff_t>(m));
    if (r.i_ell && r.j_ell) {
      r.kind = SStatKind::Interior;
      r.value = zeros_in(*r.i_ell, *r.j_ell);
    } else if (r.j_ell) {
      r.kind = SStatKind::LBound;
      r.value = zeros_in(0, *r.j_ell);
    } else if (r.i_ell) {
      r.kind = SStatKind::RBound;
      r.value = zeros_in(*r.i_ell, size_ - 1);
    } else {
      r.kind = SStatKind::Undefined;
    }
    return r;
  }

 private:
  std::size_t size_;
  std::vector<std::size_t> zeros_before_;
  std::vector<std::size_t> ones_;
};

struct DenseHit {
  std::size_t value;
  double i_pos;
  double j_pos;
};

struct RobustScan {
  std::vector<DenseHit> hits;  // every computed S, in scan order
  bool undefined = false;      // first S had no (m+1) 1s on either side
};

RobustScan scan_trace(const Bits& trace, const GapParams& gp) {
  RobustScan out;
  const TraceIndex idx(trace);
  const std::size_t n = idx.size();
  const std::size_t reach = gp.a + gp.m;
  std::size_t pos = 0;
  while (pos < n) {
    // Smallest zero i >= pos with at least a zeros within distance a + m.
    std::size_t i = idx.next_zero(pos);
    while (i < n) {
      const std::size_t lo = i >= reach ? i - reach : 0;
      if (idx.zeros_in(lo, i + reach) >= gp.a) break;
      i = idx.next_zero(i + 1);
    }
    if (i >= n) break;
    // ell: the zero preceded by exactly m zeros counted from the window start.
    const std::size_t start = std::max(i >= reach ? i - reach : 0, pos);
    const std::size_t ell = idx.nth_zero_from(start, gp.m + 1);
    if (ell >= n) break;
    const SStatResult s = idx.stat(ell, gp.m);
    if (s.kind == SStatKind::Undefined) {
      if (out.hits.empty()) out.undefined = true;
      break;
    }
    const double i_pos = s.i_ell ? static_cast<double>(*s.i_ell) : 0.0;
    const double j_pos = s.j_ell ? static_cast<double>(*s.j_ell) : static_cast<double>(n - 1);
    out.hits.push_back(DenseHit{s.value, i_pos, j_pos});
    if (s.kind == SStatKind::RBound) break;
    pos = *s.j_ell + gp.m + 2;
  }
  return out;
}

}  // namespace

std::string_view to_string(ReconStatus status) noexcept {
  switch (status) {
    case ReconStatus::Ok: return "OK";
    case ReconStatus::CountMismatchFail: return "COUNT_MISMATCH_FAIL";
    case ReconStatus::AllZeroFallback: return "ALL_ZERO_FALLBACK";
  }
  return "UNKNOWN";
}

std::string_view to_string(SStatKind kind) noexcept {
  switch (kind) {
    case SStatKind::Interior: return "INTERIOR";
    case SStatKind::LBound: return "L_BOUND";
    case SStatKind::RBound: return "R_BOUND";
    case SStatKind::Undefined: return "UNDEFINED";
  }
  return "UNKNOWN";
}

GapParams GapParams::make(double epsilon, double c_prime, double q, std::size_t n) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(c_prime > 0.0)) throw std::invalid_argument("C' must be positive");
  GapParams g;
  g.epsilon = epsilon;
  g.c_prime = c_prime;
  g.q = q;
  g.p = 1.0 - q;
  g.n = n;
  g.log_n = log_inv_q(static_cast<double>(n), q);
  g.T = std::max<std::size_t>(1, trace_count(epsilon, g.p, q, n, TraceVariant::Gap));
  g.L = std::max<std::size_t>(1, ceil_tolerant(2.0 * c_prime * g.p * g.log_n));
  g.m = floor_tolerant(epsilon * c_prime * g.log_n);
  g.a = std::max<std::size_t>(1, ceil_tolerant(g.p * c_prime * g.log_n));
  g.g_bar = 2.0 * c_prime * g.p * g.log_n;
  return g;
}

std::size_t trace_count(double epsilon, double p, double q, std::size_t n, TraceVariant variant) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  require_p(p);
  const double log_n = log_inv_q(static_cast<double>(n), q);
  const double denom = variant == TraceVariant::LongRuns ? p * epsilon * epsilon : p * p * epsilon * epsilon;
  return std::max<std::size_t>(1, ceil_tolerant(2.0 / denom * log_n));
}

std::size_t round_length(double estimate) {
  if (!(estimate > 0.0)) return 0;
  const double r = std::floor(estimate + 0.5);
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

ReconReport recon_long_runs(const TraceSet& traces, double p) {
  require_traces(traces, "recon_long_runs");
  require_p(p);
  std::vector<RunSeq> all;
  all.reserve(traces.size());
  for (const auto& t : traces) all.push_back(runs(t));

  ReconReport rep;
  rep.traces_used = traces.size();
  for (const auto& r : all) rep.per_trace_counts.push_back(r.count());
  const std::size_t k = all.front().count();
  const bool first = all.front().first_value;
  for (const auto& r : all) {
    if (r.count() != k || (k > 0 && r.first_value != first)) {
      rep.status = ReconStatus::CountMismatchFail;
      rep.note = "traces disagree on the run count or run values";
      return rep;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    double sum = 0;
    for (const auto& r : all) sum += static_cast<double>(r.lengths[i]);
    const double mu = sum / static_cast<double>(all.size());
    rep.estimates.push_back(mu);
    rep.output.append(((i % 2) == 0) == first, round_length(mu / p));
  }
  return rep;
}

ReconReport recon_long_runs_robust(const TraceSet& traces, std::size_t s, double p) {
  require_traces(traces, "recon_long_runs_robust");
  std::vector<std::size_t> counts;
  counts.reserve(traces.size());
  for (const auto& t : traces) counts.push_back(runs(t).count());
  const std::size_t best = *std::max_element(counts.begin(), counts.end());
  TraceSet kept;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (counts[i] == best) kept.push_back(traces[i]);
  }
  ReconReport rep = recon_long_runs(kept, p);
  rep.traces_used = kept.size();
  rep.per_trace_counts = std::move(counts);
  rep.thresholds.emplace_back("s", static_cast<double>(s));
  rep.thresholds.emplace_back("max_run_count", static_cast<double>(best));
  return rep;
}

ReconReport recon_one_runs(const Bits& trace, double epsilon, double p, double q, std::size_t n) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double log_n = log_inv_q(static_cast<double>(n), q);
  const std::size_t L = std::max<std::size_t>(1, ceil_tolerant(log_n / (10.0 * epsilon)));
  return recon_one_runs_with_threshold(trace, L, p);
}

ReconReport recon_one_runs_with_threshold(const Bits& trace, std::size_t L, double p) {
  require_p(p);
  const Alignment al = align_on_long_zero_runs(trace, std::max<std::size_t>(L, 1));
  std::vector<double> ones(al.ones.begin(), al.ones.end());
  std::vector<double> zeros(al.zeros.begin(), al.zeros.end());
  ReconReport rep = assemble_alternating(ones, zeros, p);
  rep.traces_used = 1;
  rep.per_trace_counts.push_back(al.zeros.size());
  rep.thresholds.emplace_back("L", static_cast<double>(L));
  return rep;
}

ReconReport recon_gap(const TraceSet& traces, const GapParams& params) {
  require_traces(traces, "recon_gap");
  require_p(params.p);
  std::vector<Alignment> all;
  all.reserve(traces.size());
  for (const auto& t : traces) all.push_back(align_on_long_zero_runs(t, std::max<std::size_t>(params.L, 1)));

  ReconReport rep;
  rep.traces_used = traces.size();
  rep.thresholds.emplace_back("L", static_cast<double>(params.L));
  for (const auto& al : all) rep.per_trace_counts.push_back(al.zeros.size());
  const std::size_t k = all.front().zeros.size();
  for (const auto& al : all) {
    if (al.zeros.size() != k) {
      rep.status = ReconStatus::CountMismatchFail;
      rep.note = "traces disagree on the number of long 0-runs";
      return rep;
    }
  }
  const auto T = static_cast<double>(all.size());
  std::vector<double> ones(k + 1, 0.0);
  std::vector<double> zeros(k, 0.0);
  for (const auto& al : all) {
    for (std::size_t i = 0; i <= k; ++i) ones[i] += static_cast<double>(al.ones[i]);
    for (std::size_t i = 0; i < k; ++i) zeros[i] += static_cast<double>(al.zeros[i]);
  }
  for (auto& v : ones) v /= T;
  for (auto& v : zeros) v /= T;
  ReconReport body = assemble_alternating(ones, zeros, params.p);
  rep.output = std::move(body.output);
  rep.estimates = std::move(body.estimates);
  return rep;
}

SStatResult s_statistic(const Bits& trace, std::size_t ell, std::size_t m) {
  if (ell >= trace.size()) throw std::out_of_range("s_statistic: ell is outside the trace");
  if (trace[ell]) throw std::invalid_argument("s_statistic: trace[ell] must be 0");
  return TraceIndex(trace).stat(ell, m);
}

ReconReport recon_gap_robust(const TraceSet& traces, const GapParams& params) {
  require_traces(traces, "recon_gap_robust");
  require_p(params.p);
  if (params.a <= 3 * params.m) {
    throw std::invalid_argument("recon_gap_robust needs a > 3m (p > 3 eps); got a = " + std::to_string(params.a) +
                                ", m = " + std::to_string(params.m));
  }

  ReconReport rep;
  rep.traces_used = traces.size();
  rep.thresholds = {{"m", static_cast<double>(params.m)},
                    {"a", static_cast<double>(params.a)},
                    {"G_bar", params.g_bar}};

  std::vector<std::vector<DenseHit>> long_hits;
  long_hits.reserve(traces.size());
  bool fallback = false;
  for (const auto& t : traces) {
    RobustScan scan = scan_trace(t, params);
    fallback = fallback || scan.undefined;
    std::vector<DenseHit> kept;
    for (const auto& h : scan.hits) {
      if (static_cast<double>(h.value) > params.g_bar) kept.push_back(h);
    }
    rep.per_trace_counts.push_back(kept.size());
    long_hits.push_back(std::move(kept));
  }

  const double mean_len = mean_length(traces);
  if (fallback) {
    rep.status = ReconStatus::AllZeroFallback;
    rep.note = "a trace has fewer than m+1 ones on both sides of its first dense index";
    rep.output = Bits(round_length(mean_len / params.p), false);
    return rep;
  }

  const std::size_t I = long_hits.front().size();
  for (const auto& h : long_hits) {
    if (h.size() != I) {
      rep.status = ReconStatus::CountMismatchFail;
      rep.note = "traces disagree on the number of long dense substrings";
      return rep;
    }
  }

  const auto T = static_cast<double>(traces.size());
  std::vector<double> mu(I, 0.0), i_hat(I, 0.0), j_hat(I, 0.0);
  for (const auto& hits : long_hits) {
    for (std::size_t t = 0; t < I; ++t) {
      mu[t] += static_cast<double>(hits[t].value);
      i_hat[t] += hits[t].i_pos;
      j_hat[t] += hits[t].j_pos;
    }
  }
  for (std::size_t t = 0; t < I; ++t) {
    mu[t] /= T;
    i_hat[t] /= T;
    j_hat[t] /= T;
  }

  std::vector<double> ones(I + 1, 0.0);
  if (I == 0) {
    ones[0] = mean_len;
  } else {
    ones[0] = i_hat[0];
    for (std::size_t t = 1; t < I; ++t) ones[t] = std::abs(i_hat[t] - j_hat[t - 1]);
    ones[I] = std::abs(mean_len - j_hat[I - 1]);
  }
  ReconReport body = assemble_alternating(ones, mu, params.p);
  rep.output = std::move(body.output);
  rep.estimates = std::move(body.estimates);
  return rep;
}

ReconReport recon_majority(const Bits& trace, double epsilon, double p, double q, std::size_t n) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  require_p(p);
  const double log_n = log_inv_q(static_cast<double>(n), q);
  const std::size_t L = ceil_tolerant(50.0 * log_n / (p * p * epsilon * epsilon));
  const std::size_t w = std::max<std::size_t>(1, round_length(epsilon * p * static_cast<double>(L)));
  ReconReport rep = recon_majority_window(trace, w, p);
  rep.thresholds.insert(rep.thresholds.begin(), {"L", static_cast<double>(L)});
  return rep;
}

ReconReport recon_majority_window(const Bits& trace, std::size_t w, double p) {
  if (w == 0) throw std::invalid_argument("recon_majority: window width must be >= 1");
  require_p(p);
  ReconReport rep;
  rep.traces_used = 1;
  rep.thresholds.emplace_back("w", static_cast<double>(w));
  const std::size_t out_len = round_length(static_cast<double>(w) / p);
  std::size_t windows = 0;
  for (std::size_t start = 0; start < trace.size(); start += w) {
    const std::size_t end = std::min(trace.size(), start + w);
    std::size_t ones = 0;
    for (std::size_t k = start; k < end; ++k) ones += trace[k] ? 1 : 0;
    const bool majority = 2 * ones >= end - start;
    rep.output.append(majority, out_len);
    rep.estimates.push_back(static_cast<double>(ones) / static_cast<double>(end - start));
    ++windows;
  }
  rep.per_trace_counts.push_back(windows);
  return rep;
}

std::optional<double> estimate_gap_constant(const TraceSet& traces, double epsilon, double p, double q, std::size_t n,
                                            std::optional<double> c_floor) {
  require_traces(traces, "estimate_gap_constant");
  require_p(p);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double log_n = log_inv_q(static_cast<double>(n), q);
  if (!(log_n > 0.0)) return std::nullopt;
  const double floor_c = c_floor.value_or(100.0 / p);

  std::vector<std::size_t> zero_lengths;
  std::size_t min_one_run = static_cast<std::size_t>(-1);
  for (const auto& t : traces) {
    const RunSeq rs = runs(t);
    for (std::size_t i = 0; i < rs.count(); ++i) {
      if (rs.value_of(i)) {
        min_one_run = std::min(min_one_run, rs.lengths[i]);
      } else {
        zero_lengths.push_back(rs.lengths[i]);
      }
    }
  }
  std::sort(zero_lengths.begin(), zero_lengths.end());

  const double c_max = static_cast<double>(n) / log_n;
  for (double c = 1.0; c <= c_max * (1.0 + 1e-12); c *= 1.1) {
    if (c < floor_c) continue;
    const std::size_t lo = ceil_tolerant(c * p * log_n);
    const std::size_t hi = floor_tolerant(3.0 * c * p * log_n);
    // Any pooled 0-run length strictly between lo and hi breaks the gap.
    const auto it = std::upper_bound(zero_lengths.begin(), zero_lengths.end(), lo);
    const bool band_empty = it == zero_lengths.end() || *it >= hi;
    const bool ones_long = min_one_run == static_cast<std::size_t>(-1) ||
                           static_cast<double>(min_one_run) >= 0.5 * p * c * log_n / epsilon;
    if (band_empty && ones_long) return c;
  }
  return std::nullopt;
}

}  // namespace tracelab
