#pragma once

#include <cstddef>
#include <optional>

#include "tracelab/bits.hpp"

namespace tracelab {

/// Levenshtein distance (unit-cost insertions, deletions, substitutions).
///
/// Bit-parallel row DP over 64-row blocks of the shorter string; memory is
/// O(min(|a|, |b|) / 64) words and time O(|a| * |b| / 64).
std::size_t edit_distance(const Bits& a, const Bits& b);

/// Exact distance when it is at most `band`, std::nullopt otherwise.
///
/// Runs a diagonal-band DP starting from a narrow band and doubling it until
/// the banded value certifies itself or the band reaches `band`. A band of
/// width k computes a value >= the true distance, equal to it whenever the
/// value is <= k. Falls back to edit_distance once a band would cost more
/// than the full bit-parallel DP. Throws std::invalid_argument when band == 0.
std::optional<std::size_t> edit_distance_banded(const Bits& a, const Bits& b, std::size_t band);

/// Witness for the block lower bound on edit distance: given a partition of
/// v into b parts, builds a partition of u into b parts with
/// sum_i [u_i != v_i] <= d_E(u, v).
struct PartitionWitness {
  Partition u_partition;
  std::size_t mismatch_sum = 0;
};

/// Follows the inductive construction: a part of v that is a prefix of the
/// remaining u is matched exactly; otherwise the part of u aligned to it in
/// an optimal alignment of the suffixes is taken and charged one edit.
///
/// Keeps a full suffix-distance table, so |u| * |v| is capped at
/// kWitnessCellLimit (std::length_error beyond).
PartitionWitness partition_edit_witness(const Bits& u, const Bits& v, const Partition& v_partition);

inline constexpr std::size_t kWitnessCellLimit = std::size_t{1} << 26;

/// Minimum over every partition of u into b parts of sum_i [u_i != v_i].
/// Exhaustive; requires |u| <= 16 and b <= 6, throws std::length_error
/// otherwise.
std::size_t min_partition_mismatch_bruteforce(const Bits& u, const Bits& v, const Partition& v_partition);

}  // namespace tracelab
