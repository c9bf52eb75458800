#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tracelab/bits.hpp"

namespace tracelab {

using BigCount = boost::multiprecision::cpp_int;

/// Number of index subsets of x that read t, i.e. subsequence embeddings.
BigCount embedding_count(const Bits& x, const Bits& t);

/// Natural log of a count; -infinity for zero.
double log_count(const BigCount& c);

/// log P(trace = t | source x) for the deletion channel with parameter q.
/// -infinity when t is not a subsequence of x (including |t| > |x|).
double trace_log_likelihood(const Bits& x, const Bits& t, double q);

/// exp(trace_log_likelihood(x, t, q)).
double trace_likelihood(const Bits& x, const Bits& t, double q);

struct LikelihoodModel {
  Bits a;
  Bits b;
  double q = 0.5;

  /// Throws std::invalid_argument on an empty candidate or q outside [0, 1).
  static LikelihoodModel make(Bits a, Bits b, double q);
};

enum class Decision { A, B, Tie };

std::string_view to_string(Decision d) noexcept;

/// Maximum-likelihood choice between the two candidates. Equal log
/// likelihoods are confirmed with exact integer arithmetic before a Tie is
/// returned. Throws std::invalid_argument on an empty trace set or a trace
/// impossible under both candidates.
Decision ml_decide(const LikelihoodModel& model, const TraceSet& traces);

struct Advantage {
  double success = 0;     // empirical success probability
  double half_width = 0;  // 95% normal-approximation half-width
  std::size_t trials = 0;
  std::size_t t_count = 0;

  double lower() const { return success - half_width; }
};

/// Monte Carlo success rate of ml_decide with t_count traces per trial.
/// The true candidate is a fair coin per trial and ties go to a fair coin.
/// Trial i draws only from streams derived from (seed, i), so results do
/// not depend on the worker count. Requires trials >= 100.
Advantage advantage_estimate(const LikelihoodModel& model, std::size_t t_count, std::size_t trials,
                             std::uint64_t seed, unsigned workers = 0);

struct DistinguishResult {
  std::optional<std::size_t> t_star;  // nullopt: not reached within t_cap
  std::vector<Advantage> curve;       // every evaluated T, ascending
};

/// Smallest T whose advantage lower bound reaches target, by doubling then
/// bisection with the same seed at every T.
DistinguishResult traces_to_distinguish(const LikelihoodModel& model, double target, std::size_t trials,
                                        std::uint64_t seed, std::size_t t_cap, unsigned workers = 0);

}  // namespace tracelab
