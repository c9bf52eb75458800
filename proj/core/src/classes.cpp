#include "tracelab/classes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tracelab/random.hpp"

namespace tracelab {

namespace {

// Stream tags so each generator draws from its own sub-stream of spec.seed.
enum : std::uint64_t {
  kTagLongRuns = 1,
  kTagOneRuns,
  kTagGap,
  kTagPerturb,
  kTagDense,
  kTagRandom,
  kTagBlocks,
};

[[noreturn]] void infeasible(const std::string& what) { throw std::invalid_argument("infeasible class spec: " + what); }

// k distinct positions in [0, len), sorted (Floyd's sampling).
std::vector<std::size_t> sample_distinct(Stream& rng, std::size_t len, std::size_t k) {
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t j = len - k; j < len; ++j) {
    const auto t = static_cast<std::size_t>(rng.between(0, j));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Generated from_lengths(bool first_value, std::vector<std::size_t> lengths) {
  Generated g;
  g.bits = from_runs(RunSeq{first_value, std::move(lengths)});
  return g;
}

bool is_gap_zero_length(std::size_t len, const ClassThresholds& t) {
  return len <= t.short_zero_max || len >= t.long_zero_min;
}

}  // namespace

std::string_view to_string(ClassKind kind) noexcept {
  switch (kind) {
    case ClassKind::AllLongRuns: return "ALL_LONG_RUNS";
    case ClassKind::LongOneRuns: return "LONG_ONE_RUNS";
    case ClassKind::GapClass: return "GAP_CLASS";
    case ClassKind::PerturbedGap: return "PERTURBED_GAP";
    case ClassKind::DenseIntervals: return "DENSE_INTERVALS";
    case ClassKind::Random: return "RANDOM";
  }
  return "UNKNOWN";
}

std::optional<ClassKind> parse_class_kind(std::string_view name) noexcept {
  for (auto k : {ClassKind::AllLongRuns, ClassKind::LongOneRuns, ClassKind::GapClass, ClassKind::PerturbedGap,
                 ClassKind::DenseIntervals, ClassKind::Random}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double log_inv_q(double n, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("log base 1/q needs 0 < q < 1");
  if (!(n >= 1.0)) throw std::invalid_argument("log of n needs n >= 1");
  const double v = std::log(n) / std::log(1.0 / q);
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return r;
  return v;
}

std::size_t ceil_tolerant(double v) {
  const double c = std::ceil(v - 1e-9 * std::max(1.0, std::abs(v)));
  return c <= 0 ? 0 : static_cast<std::size_t>(c);
}

std::size_t floor_tolerant(double v) {
  const double f = std::floor(v + 1e-9 * std::max(1.0, std::abs(v)));
  return f <= 0 ? 0 : static_cast<std::size_t>(f);
}

ClassThresholds class_thresholds(const ClassSpec& spec) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(spec.c_prime > 0.0)) throw std::invalid_argument("C' must be positive");
  ClassThresholds t;
  const double eps = spec.epsilon;
  const double c = spec.c_prime;
  t.log_n = log_inv_q(static_cast<double>(std::max<std::size_t>(spec.n, 1)), spec.q);
  const double cl = c * t.log_n;
  t.min_run = ceil_tolerant(5.0 * t.log_n);
  t.min_one_run = spec.kind == ClassKind::LongOneRuns ? ceil_tolerant(cl / (eps * eps)) : ceil_tolerant(cl / eps);
  const std::size_t gap_lo = ceil_tolerant(cl);
  t.short_zero_max = gap_lo == 0 ? 0 : gap_lo - 1;
  t.long_zero_min = ceil_tolerant(3.0 * cl) + 1;
  t.flip_budget = floor_tolerant(eps * cl);
  t.min_interval = ceil_tolerant(cl / (eps * eps));
  t.density_floor = 1.0 - eps / 12.0;
  return t;
}

Generated gen_all_long_runs(const ClassSpec& spec) {
  const auto th = class_thresholds(spec);
  const std::size_t t = std::max<std::size_t>(th.min_run, 1);
  if (spec.n < t) infeasible("n is smaller than one minimum run");
  Stream rng(derive_seed(spec.seed, {kTagLongRuns}));

  const bool first = rng.coin();
  std::vector<std::size_t> lengths;
  std::size_t remaining = spec.n;
  while (remaining > 0) {
    auto len = static_cast<std::size_t>(rng.between(t, 3 * t));
    if (len > remaining || remaining - len < t) len = remaining;
    lengths.push_back(len);
    remaining -= len;
  }

  if (spec.short_runs > 0) {
    if (t < 2) infeasible("threshold of 1 leaves no room for short runs");
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] >= 2 * t + 1) candidates.push_back(i);
    }
    if (candidates.size() < spec.short_runs) infeasible("not enough long runs to host the short runs");
    for (std::size_t i = 0; i < spec.short_runs; ++i) {
      const auto j = static_cast<std::size_t>(rng.between(i, candidates.size() - 1));
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(spec.short_runs);
    std::sort(candidates.rbegin(), candidates.rend());
    for (std::size_t idx : candidates) {
      const std::size_t r = lengths[idx];
      const auto short_len = static_cast<std::size_t>(rng.between(1, std::min(t - 1, r - 2 * t)));
      const auto head = static_cast<std::size_t>(rng.between(t, r - short_len - t));
      lengths[idx] = head;
      lengths.insert(lengths.begin() + static_cast<std::ptrdiff_t>(idx) + 1, {short_len, r - head - short_len});
    }
  }
  return from_lengths(first, std::move(lengths));
}

Generated gen_long_one_runs(const ClassSpec& spec) {
  const auto th = class_thresholds(spec);
  const std::size_t t = std::max<std::size_t>(th.min_one_run, 1);
  if (spec.n < t) infeasible("n is smaller than one minimum 1-run");
  Stream rng(derive_seed(spec.seed, {kTagOneRuns}));

  const bool first = rng.coin();
  bool value = first;
  std::vector<std::size_t> lengths;
  std::size_t remaining = spec.n;
  while (remaining > 0) {
    std::size_t len;
    if (value) {
      if (remaining < t) {
        // Too short for a 1-run: the preceding 0-run absorbs the tail.
        lengths.back() += remaining;
        break;
      }
      len = static_cast<std::size_t>(rng.between(t, 2 * t));
    } else {
      len = static_cast<std::size_t>(rng.between(1, 2 * t));
    }
    len = std::min(len, remaining);
    lengths.push_back(len);
    remaining -= len;
    value = !value;
  }
  return from_lengths(first, std::move(lengths));
}

Generated gen_gap_class(const ClassSpec& spec) {
  const auto th = class_thresholds(spec);
  const std::size_t t1 = std::max<std::size_t>(th.min_one_run, 1);
  Stream rng(derive_seed(spec.seed, {kTagGap}));

  auto zero_length = [&](std::size_t room) -> std::optional<std::size_t> {
    const bool has_short = th.short_zero_max >= 1 && room >= 1;
    const bool has_long = room >= th.long_zero_min;
    if (!has_short && !has_long) return std::nullopt;
    const bool pick_long = has_long && (!has_short || rng.uniform() < spec.long_zero_fraction);
    if (pick_long) return rng.between(th.long_zero_min, std::min(room, 2 * th.long_zero_min));
    return rng.between(1, std::min(th.short_zero_max, room));
  };

  std::vector<std::size_t> lengths;
  std::size_t remaining = spec.n;
  bool first = true;
  if (spec.leading_zero_run && rng.coin()) {
    if (spec.n < t1 + 1) {
      if (spec.n > 0 && is_gap_zero_length(spec.n, th)) return from_lengths(false, {spec.n});
    } else if (auto z = zero_length(spec.n - t1)) {
      first = false;
      lengths.push_back(*z);
      remaining -= *z;
    }
  }
  if (remaining < t1) infeasible("no room for a 1-run of the minimum length");

  while (remaining > 0) {
    auto len = std::min<std::size_t>(static_cast<std::size_t>(rng.between(t1, 2 * t1)), remaining);
    if (remaining - len < t1 + 1) {
      // Last 1-run, optionally followed by a trailing 0-run.
      std::optional<std::size_t> tail;
      if (remaining > t1 && rng.coin()) tail = zero_length(remaining - t1);
      lengths.push_back(remaining - tail.value_or(0));
      if (tail) lengths.push_back(*tail);
      break;
    }
    lengths.push_back(len);
    remaining -= len;
    const auto z = zero_length(remaining - t1);
    if (!z) {
      lengths.back() += remaining;
      break;
    }
    lengths.push_back(*z);
    remaining -= *z;
  }
  return from_lengths(first, std::move(lengths));
}

Generated perturb_runs(const Bits& y, const ClassSpec& spec) {
  const auto th = class_thresholds(spec);
  const std::size_t m = th.flip_budget;
  Stream rng(derive_seed(spec.seed, {kTagPerturb}));

  Generated g;
  g.bits = y;
  FlipLog log;
  log.base = y;
  const RunSeq rs = runs(y);
  std::size_t start = 0;
  for (std::size_t len : rs.lengths) {
    const std::size_t cap = std::min(m, len);
    std::vector<std::size_t> local;
    if (spec.adversarial_flips) {
      for (std::size_t i = 0; i < cap; ++i) local.push_back(i);
    } else {
      const auto count = static_cast<std::size_t>(rng.between(0, cap));
      local = sample_distinct(rng, len, count);
    }
    for (auto& pos : local) {
      pos += start;
      g.bits.flip(pos);
    }
    log.per_run.push_back(std::move(local));
    start += len;
  }
  g.meta.flips = std::move(log);
  return g;
}

Generated gen_perturbed_gap(const ClassSpec& spec) {
  const Generated base = gen_gap_class(spec);
  return perturb_runs(base.bits, spec);
}

Generated gen_dense_intervals(const ClassSpec& spec) {
  const auto th = class_thresholds(spec);
  const std::size_t t = std::max<std::size_t>(th.min_interval, 1);
  if (spec.n < t) infeasible("n is smaller than one minimum interval");
  Stream rng(derive_seed(spec.seed, {kTagDense}));

  Generated g;
  g.bits.reserve(spec.n);
  bool majority = rng.coin();
  std::size_t remaining = spec.n;
  while (remaining > 0) {
    auto len = static_cast<std::size_t>(rng.between(t, 2 * t));
    if (len > remaining || remaining - len < t) len = remaining;
    const std::size_t max_minority = floor_tolerant(spec.epsilon * static_cast<double>(len) / 12.0);
    const auto minority = static_cast<std::size_t>(rng.between(0, max_minority));

    Bits block(len, majority);
    for (auto pos : sample_distinct(rng, len, minority)) block.flip(pos);
    g.meta.intervals.push_back(Interval{spec.n - remaining, len, majority, minority});
    g.bits.append(block);
    remaining -= len;
    majority = spec.alternate_majority ? !majority : rng.coin();
  }
  return g;
}

Generated gen_random(const ClassSpec& spec) {
  Stream rng(derive_seed(spec.seed, {kTagRandom}));
  Generated g;
  g.bits.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) g.bits.push_back(rng.coin());
  return g;
}

Generated generate(const ClassSpec& spec) {
  switch (spec.kind) {
    case ClassKind::AllLongRuns: return gen_all_long_runs(spec);
    case ClassKind::LongOneRuns: return gen_long_one_runs(spec);
    case ClassKind::GapClass: return gen_gap_class(spec);
    case ClassKind::PerturbedGap: return gen_perturbed_gap(spec);
    case ClassKind::DenseIntervals: return gen_dense_intervals(spec);
    case ClassKind::Random: return gen_random(spec);
  }
  throw std::invalid_argument("unknown class kind");
}

std::pair<Bits, Bits> gen_hard_pair(std::size_t k) {
  if (k < 1) throw std::invalid_argument("gen_hard_pair: k must be >= 1");
  auto alternating = [](Bits& b, std::size_t pairs) {
    for (std::size_t i = 0; i < pairs; ++i) {
      b.push_back(false);
      b.push_back(true);
    }
  };
  Bits x;
  alternating(x, k);
  x.push_back(true);
  alternating(x, k + 1);
  Bits y;
  alternating(y, k + 1);
  y.push_back(true);
  alternating(y, k);
  return {std::move(x), std::move(y)};
}

std::pair<Bits, Bits> gen_hamming_pair(std::size_t k) {
  if (k < 1) throw std::invalid_argument("gen_hamming_pair: k must be >= 1");
  auto build = [k](std::size_t head, std::size_t tail) {
    Bits b(head, false);
    for (std::size_t i = 0; i < k; ++i) {
      b.push_back(false);
      b.push_back(true);
    }
    b.append(false, tail);
    return b;
  };
  return {build(k, k + 1), build(k + 1, k)};
}

std::size_t block_pair_k(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const std::size_t target = ceil_tolerant(1.0 / (128.0 * epsilon));
  return target >= 7 ? (target - 3) / 4 : 1;
}

Generated gen_block_concat(std::size_t n, double epsilon, std::uint64_t seed) {
  const std::size_t k = block_pair_k(epsilon);
  const auto [xa, xb] = gen_hard_pair(k);
  const std::size_t block = xa.size();
  const std::size_t count = n / block;
  if (count == 0) throw std::invalid_argument("gen_block_concat: n is smaller than one block");
  Stream rng(derive_seed(seed, {kTagBlocks}));

  Generated g;
  BlockTruth truth;
  truth.block_length = block;
  g.bits.reserve(n);
  for (std::size_t i = 0; i < count; ++i) {
    const bool pick_a = !rng.coin();
    truth.choices.push_back(pick_a ? PairMember::A : PairMember::B);
    g.bits.append(pick_a ? xa : xb);
  }
  truth.remainder = n - count * block;
  g.bits.append(false, truth.remainder);
  g.meta.blocks = std::move(truth);
  return g;
}

namespace {

ClassDiagnostics fail(std::string message, std::optional<std::size_t> index = std::nullopt) {
  return ClassDiagnostics{false, std::move(message), index};
}

ClassDiagnostics check_gap(const Bits& x, const ClassThresholds& th) {
  const RunSeq rs = runs(x);
  for (std::size_t i = 0; i < rs.count(); ++i) {
    const std::size_t len = rs.lengths[i];
    if (rs.value_of(i)) {
      if (len < th.min_one_run) {
        return fail("1-run " + std::to_string(i) + " has length " + std::to_string(len) + " < " +
                        std::to_string(th.min_one_run),
                    i);
      }
    } else if (!is_gap_zero_length(len, th)) {
      return fail("0-run " + std::to_string(i) + " has length " + std::to_string(len) + " inside the gap [" +
                      std::to_string(th.short_zero_max + 1) + ", " + std::to_string(th.long_zero_min - 1) + "]",
                  i);
    }
  }
  return {};
}

bool dense_ok(std::size_t len, std::size_t minority, double epsilon) {
  return static_cast<double>(minority) <= epsilon * static_cast<double>(len) / 12.0 + 1e-9;
}

constexpr std::size_t kDenseSearchLimit = 1 << 15;

}  // namespace

ClassDiagnostics validate_class(const Bits& x, const ClassSpec& spec, const ClassMetadata* meta) {
  const auto th = class_thresholds(spec);
  switch (spec.kind) {
    case ClassKind::AllLongRuns: {
      const RunSeq rs = runs(x);
      std::size_t short_seen = 0;
      for (std::size_t i = 0; i < rs.count(); ++i) {
        if (rs.lengths[i] < th.min_run && ++short_seen > spec.short_runs) {
          return fail("run " + std::to_string(i) + " has length " + std::to_string(rs.lengths[i]) + " < " +
                          std::to_string(th.min_run),
                      i);
        }
      }
      return {};
    }
    case ClassKind::LongOneRuns: {
      const RunSeq rs = runs(x);
      for (std::size_t i = 0; i < rs.count(); ++i) {
        if (rs.value_of(i) && rs.lengths[i] < th.min_one_run) {
          return fail("1-run " + std::to_string(i) + " has length " + std::to_string(rs.lengths[i]) + " < " +
                          std::to_string(th.min_one_run),
                      i);
        }
      }
      return {};
    }
    case ClassKind::GapClass:
      return check_gap(x, th);
    case ClassKind::PerturbedGap: {
      if (meta == nullptr || !meta->flips) {
        return fail("PERTURBED_GAP membership cannot be decided from the string alone; the flip log is required");
      }
      const FlipLog& log = *meta->flips;
      if (auto base = check_gap(log.base, th); !base.ok) return fail("base string: " + base.message, base.violating_index);
      if (log.base.size() != x.size()) return fail("length differs from the base string");
      const RunSeq rs = runs(log.base);
      if (log.per_run.size() != rs.count()) return fail("flip log does not match the base runs");
      Bits rebuilt = log.base;
      std::size_t start = 0;
      for (std::size_t i = 0; i < rs.count(); ++i) {
        if (log.per_run[i].size() > th.flip_budget) {
          return fail("run " + std::to_string(i) + " has " + std::to_string(log.per_run[i].size()) +
                          " flips > budget " + std::to_string(th.flip_budget),
                      i);
        }
        for (auto pos : log.per_run[i]) {
          if (pos < start || pos >= start + rs.lengths[i]) return fail("flip outside its run", i);
          rebuilt.flip(pos);
        }
        start += rs.lengths[i];
      }
      if (!(rebuilt == x)) return fail("string does not equal base xor flip log");
      return {};
    }
    case ClassKind::DenseIntervals: {
      if (meta != nullptr && !meta->intervals.empty()) {
        std::size_t expect = 0;
        for (std::size_t i = 0; i < meta->intervals.size(); ++i) {
          const Interval& iv = meta->intervals[i];
          if (iv.begin != expect) return fail("intervals are not contiguous", i);
          if (iv.length < th.min_interval) {
            return fail("interval " + std::to_string(i) + " has length " + std::to_string(iv.length) + " < " +
                            std::to_string(th.min_interval),
                        i);
          }
          if (iv.begin + iv.length > x.size()) return fail("interval runs past the end", i);
          std::size_t minority = 0;
          for (std::size_t k = iv.begin; k < iv.begin + iv.length; ++k) minority += x[k] != iv.majority ? 1 : 0;
          if (!dense_ok(iv.length, minority, spec.epsilon)) {
            return fail("interval " + std::to_string(i) + " has majority density below " +
                            std::to_string(th.density_floor),
                        i);
          }
          expect += iv.length;
        }
        if (expect != x.size()) return fail("intervals do not cover the string");
        return {};
      }
      if (x.size() > kDenseSearchLimit) return fail("string too long to search for a layout; pass the interval layout");
      // reach[e]: x[0, e) splits into valid intervals.
      const std::size_t n = x.size();
      std::vector<std::size_t> ones(n + 1, 0);
      for (std::size_t i = 0; i < n; ++i) ones[i + 1] = ones[i] + (x[i] ? 1 : 0);
      std::vector<bool> reach(n + 1, false);
      reach[0] = true;
      const std::size_t t = std::max<std::size_t>(th.min_interval, 1);
      for (std::size_t s = 0; s < n; ++s) {
        if (!reach[s]) continue;
        for (std::size_t e = s + t; e <= n; ++e) {
          const std::size_t len = e - s;
          const std::size_t o = ones[e] - ones[s];
          if (dense_ok(len, std::min(o, len - o), spec.epsilon)) reach[e] = true;
        }
      }
      if (n == 0 || !reach[n]) return fail("no partition into dense intervals exists");
      return {};
    }
    case ClassKind::Random:
      return {};
  }
  return fail("unknown class kind");
}

}  // namespace tracelab
