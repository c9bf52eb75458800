#include "tracelab/distinguish.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

#include "tracelab/channel.hpp"
#include "tracelab/random.hpp"

namespace tracelab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Counting DP with a 64-bit fast path; returns nullopt on overflow.
std::optional<std::vector<std::uint64_t>> count_u64(const Bits& x, const Bits& t) {
  const std::size_t k = t.size();
  std::vector<std::uint64_t> dp(k + 1, 0);
  dp[0] = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool bit = x[i];
    const std::size_t top = std::min(k, i + 1);
    for (std::size_t j = top; j >= 1; --j) {
      if (t[j - 1] == bit && __builtin_add_overflow(dp[j], dp[j - 1], &dp[j])) return std::nullopt;
    }
  }
  return dp;
}

double log_q_term(double q, std::size_t deleted) {
  if (deleted == 0) return 0.0;
  return static_cast<double>(deleted) * std::log(q);
}

double log_p_term(double p, std::size_t kept) {
  if (kept == 0) return 0.0;
  return static_cast<double>(kept) * std::log(p);
}

struct TracePair {
  BigCount a;
  BigCount b;
  double log_a;
  double log_b;
};

class Scorer {
 public:
  explicit Scorer(const LikelihoodModel& m) : model_(m) {}

  const TracePair& score(const Bits& t) {
    auto key = t.to_string();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    TracePair tp;
    tp.a = embedding_count(model_.a, t);
    tp.b = embedding_count(model_.b, t);
    tp.log_a = with_channel(log_count(tp.a), model_.a.size(), t.size());
    tp.log_b = with_channel(log_count(tp.b), model_.b.size(), t.size());
    return cache_.emplace(std::move(key), std::move(tp)).first->second;
  }

 private:
  double with_channel(double lc, std::size_t n, std::size_t kept) const {
    if (lc == kNegInf) return kNegInf;
    return lc + log_p_term(1.0 - model_.q, kept) + log_q_term(model_.q, n - kept);
  }

  const LikelihoodModel& model_;
  std::unordered_map<std::string, TracePair> cache_;
};

Decision decide(const LikelihoodModel& model, const TraceSet& traces, Scorer& scorer) {
  if (traces.empty()) throw std::invalid_argument("ml_decide: empty trace set");
  double sum_a = 0;
  double sum_b = 0;
  for (const auto& t : traces) {
    const TracePair& s = scorer.score(t);
    if (s.log_a == kNegInf && s.log_b == kNegInf) {
      throw std::invalid_argument("ml_decide: trace '" + t.to_string() + "' is impossible under both candidates");
    }
    sum_a += s.log_a;
    sum_b += s.log_b;
  }
  if (sum_a == kNegInf) return Decision::B;
  if (sum_b == kNegInf) return Decision::A;
  const double scale = std::max({1.0, std::abs(sum_a), std::abs(sum_b)});
  if (std::abs(sum_a - sum_b) > 1e-9 * scale) return sum_a > sum_b ? Decision::A : Decision::B;
  if (model.a.size() != model.b.size()) return sum_a > sum_b ? Decision::A : sum_b > sum_a ? Decision::B : Decision::Tie;
  // Same length: the channel factors cancel, compare the count products exactly.
  BigCount prod_a = 1;
  BigCount prod_b = 1;
  for (const auto& t : traces) {
    const TracePair& s = scorer.score(t);
    prod_a *= s.a;
    prod_b *= s.b;
  }
  if (prod_a == prod_b) return Decision::Tie;
  return prod_a > prod_b ? Decision::A : Decision::B;
}

unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

BigCount embedding_count(const Bits& x, const Bits& t) {
  if (t.size() > x.size()) return 0;
  if (auto fast = count_u64(x, t)) return BigCount((*fast)[t.size()]);
  const std::size_t k = t.size();
  std::vector<BigCount> dp(k + 1, 0);
  dp[0] = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool bit = x[i];
    const std::size_t top = std::min(k, i + 1);
    for (std::size_t j = top; j >= 1; --j) {
      if (t[j - 1] == bit) dp[j] += dp[j - 1];
    }
  }
  return dp[k];
}

double log_count(const BigCount& c) {
  if (c <= 0) return kNegInf;
  const std::size_t bits = boost::multiprecision::msb(c) + 1;
  if (bits <= 1000) return std::log(c.convert_to<double>());
  // Leading 64 bits, then rescale.
  const std::size_t shift = bits - 64;
  double top = 0;
  for (std::size_t b = bits; b-- > shift;) top = 2.0 * top + (boost::multiprecision::bit_test(c, b) ? 1.0 : 0.0);
  return std::log(top) + static_cast<double>(shift) * std::log(2.0);
}

double trace_log_likelihood(const Bits& x, const Bits& t, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
  if (t.size() > x.size()) return kNegInf;
  if (q == 0.0) return t == x ? 0.0 : kNegInf;
  if (q == 1.0) return t.empty() ? 0.0 : kNegInf;
  const double lc = log_count(embedding_count(x, t));
  if (lc == kNegInf) return kNegInf;
  return lc + log_p_term(1.0 - q, t.size()) + log_q_term(q, x.size() - t.size());
}

double trace_likelihood(const Bits& x, const Bits& t, double q) { return std::exp(trace_log_likelihood(x, t, q)); }

LikelihoodModel LikelihoodModel::make(Bits a, Bits b, double q) {
  if (a.empty() || b.empty()) throw std::invalid_argument("likelihood model candidates must be nonempty");
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("likelihood model needs q in [0, 1)");
  return LikelihoodModel{std::move(a), std::move(b), q};
}

std::string_view to_string(Decision d) noexcept {
  switch (d) {
    case Decision::A: return "A";
    case Decision::B: return "B";
    case Decision::Tie: return "TIE";
  }
  return "UNKNOWN";
}

Decision ml_decide(const LikelihoodModel& model, const TraceSet& traces) {
  Scorer scorer(model);
  return decide(model, traces, scorer);
}

Advantage advantage_estimate(const LikelihoodModel& model, std::size_t t_count, std::size_t trials,
                             std::uint64_t seed, unsigned workers) {
  if (trials < 100) throw std::invalid_argument("advantage_estimate: trials must be >= 100");
  if (t_count == 0) throw std::invalid_argument("advantage_estimate: t_count must be >= 1");
  const unsigned w = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(trials));
  std::vector<std::size_t> wins(w, 0);

  auto run = [&](unsigned id) {
    Scorer scorer(model);
    for (std::size_t trial = id; trial < trials; trial += w) {
      Stream rng(derive_seed(seed, {trial}));
      const bool truth_a = rng.coin();
      const auto ch = ChannelParams::unchecked_for_testing(model.q, derive_seed(seed, {trial, 1}));
      const TraceSet traces = sample_traces(truth_a ? model.a : model.b, ch, t_count);
      Decision d = decide(model, traces, scorer);
      if (d == Decision::Tie) d = rng.coin() ? Decision::A : Decision::B;
      if ((d == Decision::A) == truth_a) ++wins[id];
    }
  };
  std::vector<std::thread> pool;
  for (unsigned id = 1; id < w; ++id) pool.emplace_back(run, id);
  run(0);
  for (auto& th : pool) th.join();

  std::size_t total = 0;
  for (auto v : wins) total += v;
  Advantage adv;
  adv.trials = trials;
  adv.t_count = t_count;
  adv.success = static_cast<double>(total) / static_cast<double>(trials);
  adv.half_width = 1.96 * std::sqrt(adv.success * (1.0 - adv.success) / static_cast<double>(trials));
  return adv;
}

DistinguishResult traces_to_distinguish(const LikelihoodModel& model, double target, std::size_t trials,
                                        std::uint64_t seed, std::size_t t_cap, unsigned workers) {
  if (!(target > 0.5 && target < 1.0)) throw std::invalid_argument("target success must lie in (1/2, 1)");
  if (t_cap == 0) throw std::invalid_argument("t_cap must be >= 1");
  std::map<std::size_t, Advantage> seen;
  auto passes = [&](std::size_t T) {
    auto it = seen.find(T);
    if (it == seen.end()) it = seen.emplace(T, advantage_estimate(model, T, trials, seed, workers)).first;
    return it->second.lower() >= target;
  };

  DistinguishResult res;
  std::size_t lo = 0;  // largest T known to fail
  std::optional<std::size_t> hi;
  for (std::size_t T = 1;; T *= 2) {
    const std::size_t probe = std::min(T, t_cap);
    if (passes(probe)) {
      hi = probe;
      break;
    }
    lo = probe;
    if (probe == t_cap) break;
  }
  if (hi) {
    while (*hi - lo > 1) {
      const std::size_t mid = lo + (*hi - lo) / 2;
      if (passes(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  res.t_star = hi;
  for (const auto& [T, adv] : seen) res.curve.push_back(adv);
  return res;
}

}  // namespace tracelab
