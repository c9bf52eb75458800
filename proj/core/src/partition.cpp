#include "tracelab/edit_distance.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracelab {

namespace {

bool equal_ranges(const Bits& u, std::size_t ub, std::size_t ue, const Bits& v, std::size_t vb, std::size_t ve) {
  if (ue - ub != ve - vb) return false;
  for (std::size_t i = 0; i < ue - ub; ++i) {
    if (u[ub + i] != v[vb + i]) return false;
  }
  return true;
}

// dist(i, j) = d_E(u[i..], v[j..]).
class SuffixTable {
 public:
  SuffixTable(const Bits& u, const Bits& v) : rows_(u.size() + 1), cols_(v.size() + 1), d_(rows_ * cols_) {
    const std::size_t nu = u.size();
    const std::size_t nv = v.size();
    for (std::size_t j = 0; j <= nv; ++j) at(nu, j) = static_cast<std::uint32_t>(nv - j);
    for (std::size_t i = nu; i-- > 0;) {
      at(i, nv) = static_cast<std::uint32_t>(nu - i);
      for (std::size_t j = nv; j-- > 0;) {
        const std::uint32_t diag = at(i + 1, j + 1) + (u[i] != v[j] ? 1u : 0u);
        const std::uint32_t del_u = at(i + 1, j) + 1;
        const std::uint32_t del_v = at(i, j + 1) + 1;
        at(i, j) = std::min({diag, del_u, del_v});
      }
    }
  }

  std::uint32_t& at(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  std::uint32_t at(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint32_t> d_;
};

}  // namespace

PartitionWitness partition_edit_witness(const Bits& u, const Bits& v, const Partition& v_partition) {
  v_partition.validate(v.size());
  if ((u.size() + 1) * (v.size() + 1) > kWitnessCellLimit) {
    throw std::length_error("partition_edit_witness: inputs exceed the traceback table limit");
  }
  const SuffixTable table(u, v);
  const std::size_t nu = u.size();
  const std::size_t parts = v_partition.parts();

  PartitionWitness w;
  w.u_partition.boundaries.push_back(0);
  std::size_t pos = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t vb = v_partition.begin(p);
    const std::size_t ve = v_partition.end(p);
    std::size_t next;
    if (p + 1 == parts) {
      next = nu;
    } else if (ve - vb <= nu - pos && equal_ranges(u, pos, pos + (ve - vb), v, vb, ve)) {
      next = pos + (ve - vb);
    } else {
      // Walk an optimal alignment of u[pos..] against v[vb..] until this
      // part of v is consumed.
      std::size_t i = pos;
      std::size_t j = vb;
      while (j < ve) {
        const std::uint32_t here = table.at(i, j);
        if (i < nu && here == table.at(i + 1, j + 1) + (u[i] != v[j] ? 1u : 0u)) {
          ++i;
          ++j;
        } else if (here == table.at(i, j + 1) + 1) {
          ++j;
        } else {
          ++i;
        }
      }
      next = i;
    }
    if (!equal_ranges(u, pos, next, v, vb, ve)) ++w.mismatch_sum;
    w.u_partition.boundaries.push_back(next);
    pos = next;
  }
  return w;
}

std::size_t min_partition_mismatch_bruteforce(const Bits& u, const Bits& v, const Partition& v_partition) {
  v_partition.validate(v.size());
  const std::size_t parts = v_partition.parts();
  if (u.size() > 16 || parts > 6) {
    throw std::length_error("min_partition_mismatch_bruteforce: budget is |u| <= 16, b <= 6");
  }
  const std::size_t nu = u.size();
  std::vector<std::size_t> cuts(parts + 1, 0);
  cuts[parts] = nu;
  std::size_t best = parts;

  // Enumerate weakly increasing cut vectors c1 <= ... <= c_{b-1} in [0, nu].
  auto recurse = [&](auto&& self, std::size_t p, std::size_t mismatches) -> void {
    if (mismatches >= best) return;
    if (p + 1 == parts) {
      const std::size_t last = mismatches +
          (equal_ranges(u, cuts[p], nu, v, v_partition.begin(p), v_partition.end(p)) ? 0 : 1);
      best = std::min(best, last);
      return;
    }
    for (std::size_t c = cuts[p]; c <= nu; ++c) {
      cuts[p + 1] = c;
      const bool eq = equal_ranges(u, cuts[p], c, v, v_partition.begin(p), v_partition.end(p));
      self(self, p + 1, mismatches + (eq ? 0 : 1));
    }
  };
  cuts[0] = 0;
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace tracelab
