#include "tracelab/bits.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tracelab {

namespace {

constexpr std::uint64_t low_mask(std::size_t bits) {
  return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

}  // namespace

Bits::Bits(std::size_t n, bool value) : words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0), size_(n) {
  if (value && (n & 63) != 0) words_.back() &= low_mask(n & 63);
}

Bits Bits::from_string(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '0') {
      out.push_back(false);
    } else if (c == '1') {
      out.push_back(true);
    } else {
      throw std::invalid_argument(std::string("invalid bit character '") + c + "'");
    }
  }
  return out;
}

std::string Bits::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

bool Bits::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("Bits::at");
  return (*this)[i];
}

void Bits::append(bool value, std::size_t count) {
  if (count == 0) return;
  // Fill the partial tail word first, then whole words.
  std::size_t offset = size_ & 63;
  if (offset != 0) {
    const std::size_t take = std::min<std::size_t>(64 - offset, count);
    if (value) words_.back() |= low_mask(take) << offset;
    size_ += take;
    count -= take;
  }
  const std::size_t whole = count / 64;
  words_.insert(words_.end(), whole, value ? ~std::uint64_t{0} : 0);
  size_ += whole * 64;
  count -= whole * 64;
  if (count > 0) {
    words_.push_back(value ? low_mask(count) : 0);
    size_ += count;
  }
}

void Bits::append(const Bits& other) {
  if ((size_ & 63) == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    size_ += other.size_;
    return;
  }
  reserve(size_ + other.size_);
  for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
}

Bits Bits::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size_) throw std::out_of_range("Bits::slice");
  Bits out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back((*this)[i]);
  return out;
}

std::size_t Bits::count(bool value) const noexcept {
  std::size_t ones = 0;
  for (auto w : words_) ones += static_cast<std::size_t>(std::popcount(w));
  return value ? ones : size_ - ones;
}

std::size_t Bits::find_next(bool value, std::size_t from) const noexcept {
  if (from >= size_) return size_;
  std::size_t w = from >> 6;
  std::uint64_t word = value ? words_[w] : ~words_[w];
  word &= ~low_mask(from & 63);
  while (true) {
    if (word != 0) {
      const std::size_t idx = (w << 6) + static_cast<std::size_t>(std::countr_zero(word));
      return idx < size_ ? idx : size_;
    }
    if (++w >= words_.size()) return size_;
    word = value ? words_[w] : ~words_[w];
  }
}

RunSeq runs(const Bits& x) {
  RunSeq r;
  if (x.empty()) return r;
  r.first_value = x[0];
  std::size_t pos = 0;
  bool value = r.first_value;
  while (pos < x.size()) {
    const std::size_t next = x.find_next(!value, pos);
    r.lengths.push_back(next - pos);
    pos = next;
    value = !value;
  }
  return r;
}

Bits from_runs(const RunSeq& r) {
  Bits out;
  for (std::size_t i = 0; i < r.lengths.size(); ++i) {
    if (r.lengths[i] == 0) throw std::invalid_argument("from_runs: zero-length run");
    out.append(r.value_of(i), r.lengths[i]);
  }
  return out;
}

Partition Partition::from_sizes(std::span<const std::size_t> sizes) {
  Partition p;
  p.boundaries.reserve(sizes.size() + 1);
  p.boundaries.push_back(0);
  for (auto s : sizes) p.boundaries.push_back(p.boundaries.back() + s);
  return p;
}

void Partition::validate(std::size_t length) const {
  if (boundaries.size() < 2) throw std::invalid_argument("partition needs at least one part");
  if (boundaries.front() != 0) throw std::invalid_argument("partition must start at 0");
  if (boundaries.back() != length) throw std::invalid_argument("partition must end at string length");
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] < boundaries[i - 1]) throw std::invalid_argument("partition boundaries must be weakly increasing");
  }
}

std::size_t hamming_distance(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

double density(const Bits& x, bool v) {
  if (x.empty()) throw std::invalid_argument("density of an empty string");
  return static_cast<double>(x.count(v)) / static_cast<double>(x.size());
}

std::vector<Bits> read_bits_lines(std::istream& in) {
  std::vector<Bits> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(Bits::from_string(line));
  }
  return out;
}

void write_bits_line(std::ostream& out, const Bits& x) { out << x.to_string() << '\n'; }

}  // namespace tracelab
