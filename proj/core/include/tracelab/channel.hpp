#pragma once

#include <cstddef>
#include <cstdint>

#include "tracelab/bits.hpp"

namespace tracelab {

/// I.i.d. deletion channel: each bit is deleted with probability q and kept
/// with probability p = 1 - q.
class ChannelParams {
 public:
  static constexpr double kMinQ = 0.05;
  static constexpr double kMaxQ = 0.95;

  /// Production constructor; throws std::invalid_argument unless
  /// kMinQ <= q <= kMaxQ.
  static ChannelParams make(double q, std::uint64_t master_seed);

  /// Accepts any q in [0, 1], including the noiseless and all-deleting
  /// limits. Tests only.
  static ChannelParams unchecked_for_testing(double q, std::uint64_t master_seed);

  double q() const noexcept { return q_; }
  double p() const noexcept { return p_; }
  std::uint64_t master_seed() const noexcept { return seed_; }

 private:
  ChannelParams(double q, std::uint64_t seed) : q_(q), p_(1.0 - q), seed_(seed) {}

  double q_;
  double p_;
  std::uint64_t seed_;
};

/// One trace of x. Each source bit gets its own uniform draw from a stream
/// seeded by (master_seed, trial), so the result is a pure function of the
/// arguments.
Bits sample_trace(const Bits& x, const ChannelParams& ch, std::uint64_t trial);

/// sample_trace(x, ch, i) for i = 0 .. t_count - 1. Throws on t_count == 0.
TraceSet sample_traces(const Bits& x, const ChannelParams& ch, std::size_t t_count);

/// True iff t is a subsequence of x (greedy left-to-right matching).
bool is_subsequence(const Bits& t, const Bits& x);

}  // namespace tracelab
