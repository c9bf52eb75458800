#include "tracelab/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tracelab/random.hpp"

namespace tracelab {

ChannelParams ChannelParams::make(double q, std::uint64_t master_seed) {
  if (!(q >= kMinQ && q <= kMaxQ)) {
    throw std::invalid_argument("deletion probability q must lie in [0.05, 0.95], got " + std::to_string(q));
  }
  return ChannelParams(q, master_seed);
}

ChannelParams ChannelParams::unchecked_for_testing(double q, std::uint64_t master_seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
  return ChannelParams(q, master_seed);
}

Bits sample_trace(const Bits& x, const ChannelParams& ch, std::uint64_t trial) {
  Stream rng(derive_seed(ch.master_seed(), {trial}));
  // Keep bit iff the top 53 bits of a draw fall below p * 2^53.
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(ch.p(), 53));

  Bits out;
  out.reserve(x.size());
  const auto words = x.words();
  std::size_t remaining = x.size();
  for (std::uint64_t word : words) {
    const std::size_t take = remaining < 64 ? remaining : 64;
    for (std::size_t b = 0; b < take; ++b) {
      if ((rng() >> 11) < threshold) out.push_back(((word >> b) & 1u) != 0);
    }
    remaining -= take;
  }
  return out;
}

TraceSet sample_traces(const Bits& x, const ChannelParams& ch, std::size_t t_count) {
  if (t_count == 0) throw std::invalid_argument("sample_traces: t_count must be >= 1");
  TraceSet traces;
  traces.reserve(t_count);
  for (std::size_t i = 0; i < t_count; ++i) traces.push_back(sample_trace(x, ch, i));
  return traces;
}

bool is_subsequence(const Bits& t, const Bits& x) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    j = x.find_next(t[i], j);
    if (j >= x.size()) return false;
    ++j;
  }
  return true;
}

}  // namespace tracelab
