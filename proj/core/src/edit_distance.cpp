#include "tracelab/edit_distance.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tracelab {

namespace {

using Word = std::uint64_t;
constexpr Word kHighBit = Word{1} << 63;

// One 64-row block of the Myers/Hyyro bit-vector recurrence. `hin` is the
// horizontal delta entering the block from above, the return value is the
// delta leaving its bottom row.
inline int advance_block(Word& pv, Word& mv, Word eq, int hin) {
  const Word hin_neg = hin < 0 ? 1 : 0;
  const Word hin_pos = hin > 0 ? 1 : 0;
  const Word xv = eq | mv;
  eq |= hin_neg;
  const Word xh = (((eq & pv) + pv) ^ pv) | eq;
  Word ph = mv | ~(xh | pv);
  Word mh = pv & xh;
  int hout = 0;
  if (ph & kHighBit) hout = 1;
  if (mh & kHighBit) hout = -1;
  ph = (ph << 1) | hin_pos;
  mh = (mh << 1) | hin_neg;
  pv = mh | ~(xv | ph);
  mv = ph & xv;
  return hout;
}

// Diagonal-band DP restricted to |i - j| <= k. Values saturate at k + 1.
std::size_t banded_value(const Bits& a, const Bits& b, std::size_t k) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t inf = k + 1;
  if ((n > m ? n - m : m - n) > k) return inf;

  const std::size_t width = 2 * k + 1;
  std::vector<std::size_t> prev(width, inf);
  std::vector<std::size_t> cur(width, inf);
  // Cell (i, j) lives at index j - i + k.
  for (std::size_t j = 0; j <= std::min(m, k); ++j) prev[j + k] = j;

  for (std::size_t i = 1; i <= n; ++i) {
    std::fill(cur.begin(), cur.end(), inf);
    const std::size_t j_lo = i > k ? i - k : 0;
    const std::size_t j_hi = std::min(m, i + k);
    std::size_t row_min = inf;
    const bool ai = a[i - 1];
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      const std::size_t d = j + k - i;
      std::size_t best;
      if (j == 0) {
        best = i;
      } else {
        best = prev[d] + (ai != b[j - 1] ? 1 : 0);
        if (d + 1 < width) best = std::min(best, prev[d + 1] + 1);
        if (d >= 1) best = std::min(best, cur[d - 1] + 1);
      }
      best = std::min(best, inf);
      cur[d] = best;
      row_min = std::min(row_min, best);
    }
    if (row_min >= inf) return inf;
    std::swap(prev, cur);
  }
  return prev[m + k - n];
}

}  // namespace

std::size_t edit_distance(const Bits& a, const Bits& b) {
  const Bits& pattern = a.size() <= b.size() ? a : b;
  const Bits& text = a.size() <= b.size() ? b : a;
  const std::size_t m = pattern.size();
  const std::size_t n = text.size();
  if (m == 0) return n;

  const std::size_t blocks = (m + 63) / 64;
  std::vector<Word> peq0(blocks, 0);
  std::vector<Word> peq1(blocks, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const Word bit = Word{1} << (i & 63);
    if (pattern[i]) {
      peq1[i >> 6] |= bit;
    } else {
      peq0[i >> 6] |= bit;
    }
  }

  std::vector<Word> pv(blocks, ~Word{0});
  std::vector<Word> mv(blocks, 0);
  // Score of the bottom row of the last block, counting padding rows.
  long long bottom = static_cast<long long>(blocks * 64);

  for (std::size_t j = 0; j < n; ++j) {
    const std::vector<Word>& peq = text[j] ? peq1 : peq0;
    int h = 1;
    for (std::size_t blk = 0; blk < blocks; ++blk) h = advance_block(pv[blk], mv[blk], peq[blk], h);
    bottom += h;
  }

  // Walk back up from the padded bottom row to row m.
  const std::size_t last = blocks - 1;
  const std::size_t local = (m - 1) - 64 * last;
  for (std::size_t bit = local + 1; bit < 64; ++bit) {
    if ((pv[last] >> bit) & 1) --bottom;
    if ((mv[last] >> bit) & 1) ++bottom;
  }
  return static_cast<std::size_t>(bottom);
}

std::optional<std::size_t> edit_distance_banded(const Bits& a, const Bits& b, std::size_t band) {
  if (band == 0) throw std::invalid_argument("edit_distance_banded: band must be >= 1");
  const std::size_t len_gap = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (len_gap > band) return std::nullopt;

  std::size_t k = std::min(band, std::max<std::size_t>(len_gap, 32));
  // Once a band costs more than the bit-parallel full DP, switch to it.
  const double full_cost = static_cast<double>(a.size()) * static_cast<double>(b.size()) / 16.0;
  while (true) {
    if (static_cast<double>(2 * k + 1) * static_cast<double>(std::max(a.size(), b.size())) > full_cost) {
      const std::size_t exact = edit_distance(a, b);
      if (exact <= band) return exact;
      return std::nullopt;
    }
    const std::size_t value = banded_value(a, b, k);
    if (value <= k) return value;
    if (k >= band) return std::nullopt;
    k = std::min(band, 2 * k);
  }
}

}  // namespace tracelab
