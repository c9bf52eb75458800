#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tracelab/bits.hpp"
#include "tracelab/classes.hpp"
#include "tracelab/edit_distance.hpp"

using namespace tracelab;

namespace {
Bits B(const std::string& s) { return Bits::from_string(s); }

std::size_t part_mismatch(const Bits& u, const Partition& pu, const Bits& v, const Partition& pv) {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < pv.parts(); ++i) {
    sum += u.slice(pu.begin(i), pu.end(i)) == v.slice(pv.begin(i), pv.end(i)) ? 0 : 1;
  }
  return sum;
}

Partition random_partition(std::mt19937_64& rng, std::size_t len, std::size_t parts) {
  std::vector<std::size_t> cuts{0, len};
  for (std::size_t i = 1; i < parts; ++i) cuts.push_back(len == 0 ? 0 : rng() % (len + 1));
  std::sort(cuts.begin(), cuts.end());
  return Partition{cuts};
}
}  // namespace

TEST_CASE("edit distance examples") {
  CHECK(edit_distance(B("0011"), B("0101")) == 2);
  CHECK(edit_distance(B("0110"), B("0110")) == 0);
  CHECK(edit_distance(B(""), B("101")) == 3);
  CHECK(edit_distance(B("101"), B("")) == 3);
  CHECK(edit_distance(B(""), B("")) == 0);
}

TEST_CASE("edit distance matches exponential recursion on every pair up to length 6") {
  std::vector<std::string> all;
  for (std::size_t n = 0; n <= 6; ++n) {
    for (auto& s : oracle::all_strings(n)) all.push_back(s);
  }
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < all.size(); i += 3) {
    for (std::size_t j = 0; j < all.size(); j += 5) {
      mismatches += edit_distance(B(all[i]), B(all[j])) == oracle::naive_edit(all[i], all[j]) ? 0 : 1;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("edit distance matches the memoized recursion across 64-bit block edges") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 400; ++iter) {
    const std::size_t n = rng() % 200;
    const std::size_t m = rng() % 200;
    const auto a = oracle::random_string(rng, n);
    auto b = oracle::random_string(rng, m);
    if (iter % 2 == 0) {
      // Near-copies exercise small distances.
      b = a;
      for (int e = 0; e < 3 && !b.empty(); ++e) b.erase(rng() % b.size(), 1);
    }
    const std::size_t want = oracle::memo_edit(a, b);
    CHECK(edit_distance(B(a), B(b)) == want);
    const std::size_t band = 1 + rng() % 40;
    const auto banded = edit_distance_banded(B(a), B(b), band);
    if (want <= band) {
      REQUIRE(banded.has_value());
      CHECK(*banded == want);
    } else {
      CHECK_FALSE(banded.has_value());
    }
  }
}

TEST_CASE("banded edit distance examples") {
  CHECK(edit_distance_banded(B("0011"), B("0101"), 5) == std::optional<std::size_t>(2));
  CHECK(edit_distance_banded(B("0110"), B("0110"), 1) == std::optional<std::size_t>(0));
  CHECK_FALSE(edit_distance_banded(B("0000"), B("1111"), 2).has_value());
  CHECK_THROWS_AS(edit_distance_banded(B("0"), B("1"), 0), std::invalid_argument);
}

TEST_CASE("banded distance on long near-equal strings") {
  std::mt19937_64 rng(9);
  const auto a = oracle::random_string(rng, 5000);
  auto b = a;
  for (int e = 0; e < 40; ++e) b.erase(rng() % b.size(), 1);
  for (int e = 0; e < 40; ++e) b.insert(rng() % b.size(), 1, '1');
  const std::size_t exact = edit_distance(B(a), B(b));
  CHECK(exact <= 80);
  CHECK(edit_distance_banded(B(a), B(b), 200) == std::optional<std::size_t>(exact));
  CHECK(edit_distance_banded(B(a), B(b), 100000) == std::optional<std::size_t>(exact));
}

TEST_CASE("metric axioms on random triples up to 64 bits") {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 500; ++iter) {
    const Bits x = B(oracle::random_string(rng, rng() % 65));
    const Bits y = B(oracle::random_string(rng, rng() % 65));
    const Bits z = B(oracle::random_string(rng, rng() % 65));
    const auto xy = edit_distance(x, y);
    CHECK(xy == edit_distance(y, x));
    CHECK(edit_distance(x, x) == 0);
    CHECK((xy == 0) == (x == y));
    CHECK(xy <= std::max(x.size(), y.size()));
    CHECK(xy <= edit_distance(x, z) + edit_distance(z, y));
  }
}

TEST_CASE("blockwise edits bound the total distance") {
  std::mt19937_64 rng(33);
  for (int iter = 0; iter < 200; ++iter) {
    Bits whole, edited;
    std::size_t sum = 0;
    const std::size_t blocks = 1 + rng() % 6;
    for (std::size_t i = 0; i < blocks; ++i) {
      const auto piece = oracle::random_string(rng, rng() % 40);
      auto changed = piece;
      for (int e = 0; e < 4; ++e) {
        const auto op = rng() % 3;
        if (op == 0 && !changed.empty()) changed.erase(rng() % changed.size(), 1);
        if (op == 1) changed.insert(changed.empty() ? 0 : rng() % changed.size(), 1, '0');
        if (op == 2 && !changed.empty()) changed[rng() % changed.size()] ^= 1;
      }
      whole.append(B(piece));
      edited.append(B(changed));
      sum += edit_distance(B(piece), B(changed));
    }
    CHECK(edit_distance(whole, edited) <= sum);
  }
}

TEST_CASE("partition witness examples") {
  const Bits u = B("10001");
  const Bits v = B("01100");
  const auto w = partition_edit_witness(u, v, Partition::single(5));
  CHECK(w.mismatch_sum <= edit_distance(u, v));
  CHECK(w.u_partition.boundaries == std::vector<std::size_t>{0, 5});

  const Bits same = B("0110101");
  const std::size_t sizes[] = {3, 0, 4};
  CHECK(partition_edit_witness(same, same, Partition::from_sizes(sizes)).mismatch_sum == 0);

  const auto [xa, xb] = gen_hard_pair(1);
  Bits uu = xa;
  uu.append(xb);
  Bits vv = xa;
  vv.append(xa);
  const std::size_t blocks[] = {7, 7};
  const auto hw = partition_edit_witness(uu, vv, Partition::from_sizes(blocks));
  CHECK(hw.mismatch_sum == 1);
  CHECK(edit_distance(uu, vv) >= 1);
}

TEST_CASE("brute force minimum over partitions") {
  const Bits u = B("0110");
  const std::size_t sizes[] = {1, 2, 1};
  CHECK(min_partition_mismatch_bruteforce(u, u, Partition::from_sizes(sizes)) == 0);
  // Every split of "01" into two parts differs from ("1", "0") in both parts.
  const std::size_t one_one[] = {1, 1};
  CHECK(min_partition_mismatch_bruteforce(B("01"), B("10"), Partition::from_sizes(one_one)) == 2);
  CHECK(edit_distance(B("01"), B("10")) == 2);
  CHECK_THROWS_AS(min_partition_mismatch_bruteforce(Bits(17, true), Bits(3, true), Partition::single(3)),
                  std::length_error);
  const std::size_t seven[] = {1, 1, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(min_partition_mismatch_bruteforce(Bits(7, true), Bits(7, true), Partition::from_sizes(seven)),
                  std::length_error);
}

TEST_CASE("block partition bound on random instances") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 1500; ++iter) {
    const Bits u = B(oracle::random_string(rng, rng() % 17));
    const Bits v = B(oracle::random_string(rng, rng() % 17));
    const Partition pv = random_partition(rng, v.size(), 1 + rng() % 6);
    const std::size_t d = edit_distance(u, v);
    const std::size_t brute = min_partition_mismatch_bruteforce(u, v, pv);
    const auto w = partition_edit_witness(u, v, pv);
    CHECK(brute <= d);
    CHECK(w.mismatch_sum <= d);
    CHECK(w.mismatch_sum >= brute);
    REQUIRE(w.u_partition.parts() == pv.parts());
    CHECK_NOTHROW(w.u_partition.validate(u.size()));
    CHECK(part_mismatch(u, w.u_partition, v, pv) == w.mismatch_sum);
  }
}

TEST_CASE("witness cell cap") {
  const Bits big(std::size_t{1} << 14, true);
  CHECK_THROWS_AS(partition_edit_witness(big, Bits(std::size_t{1} << 13, false), Partition::single(1 << 13)),
                  std::length_error);
}
