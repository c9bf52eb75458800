#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tracelab {

/// A finite binary string stored bit-packed, 64 bits per word.
///
/// Bits beyond size() in the last word are always zero, so equality and
/// popcounts can work on whole words.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n, bool value = false);

  /// Parses the ASCII `0`/`1` encoding. Throws std::invalid_argument on any
  /// other character.
  static Bits from_string(std::string_view text);
  std::string to_string() const;

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  bool at(std::size_t i) const;

  void set(std::size_t i, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  void push_back(bool value) {
    if ((size_ & 63) == 0) words_.push_back(0);
    if (value) words_.back() |= std::uint64_t{1} << (size_ & 63);
    ++size_;
  }
  /// Appends `count` copies of `value`.
  void append(bool value, std::size_t count);
  void append(const Bits& other);
  void reserve(std::size_t n) { words_.reserve((n + 63) / 64); }
  void clear() noexcept {
    words_.clear();
    size_ = 0;
  }

  /// Half-open slice [begin, end). Throws std::out_of_range.
  Bits slice(std::size_t begin, std::size_t end) const;

  /// Number of positions equal to `value`.
  std::size_t count(bool value) const noexcept;

  /// First index >= from whose bit equals `value`, or size() if none.
  std::size_t find_next(bool value, std::size_t from) const noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const Bits& a, const Bits& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

using TraceSet = std::vector<Bits>;

/// Run-length decomposition: runs alternate in value starting at first_value.
struct RunSeq {
  bool first_value = false;
  std::vector<std::size_t> lengths;

  bool value_of(std::size_t run) const noexcept { return first_value ^ ((run & 1) != 0); }
  std::size_t count() const noexcept { return lengths.size(); }
  bool empty() const noexcept { return lengths.empty(); }
  friend bool operator==(const RunSeq&, const RunSeq&) = default;
};

RunSeq runs(const Bits& x);

/// Inverse of runs(). Throws std::invalid_argument if any length is zero.
Bits from_runs(const RunSeq& r);

/// Weakly increasing cut indices 0 = c0 <= c1 <= ... <= cb = length, naming
/// b contiguous and possibly empty parts.
struct Partition {
  std::vector<std::size_t> boundaries;

  static Partition single(std::size_t length) { return Partition{{0, length}}; }
  static Partition from_sizes(std::span<const std::size_t> sizes);

  std::size_t parts() const noexcept {
    return boundaries.empty() ? 0 : boundaries.size() - 1;
  }
  std::size_t begin(std::size_t part) const { return boundaries.at(part); }
  std::size_t end(std::size_t part) const { return boundaries.at(part + 1); }
  std::size_t length() const noexcept { return boundaries.empty() ? 0 : boundaries.back(); }

  /// Throws std::invalid_argument unless this partitions a string of `length`.
  void validate(std::size_t length) const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Throws std::invalid_argument when the lengths differ.
std::size_t hamming_distance(const Bits& a, const Bits& b);

/// Fraction of positions of x equal to v. Throws std::invalid_argument on empty x.
double density(const Bits& x, bool v);

// Text codec: one string per line, ASCII 0/1, newline-terminated. Empty
// lines are empty strings (an all-deleted trace is legal).
std::vector<Bits> read_bits_lines(std::istream& in);
void write_bits_line(std::ostream& out, const Bits& x);

}  // namespace tracelab
