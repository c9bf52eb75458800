// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tracelab/channel.hpp"
#include "tracelab/classes.hpp"
#include "tracelab/distinguish.hpp"
#include "tracelab/edit_distance.hpp"
#include "tracelab/harness.hpp"

using namespace tracelab;

namespace {

// Pinned tolerances.
constexpr std::size_t kTrials = 100;
constexpr std::size_t kNeedStrict = 95;      // criteria 1, 3, 4
constexpr std::size_t kNeedRobust = 90;      // criterion 2
constexpr std::size_t kMetricPairs = 10000;  // criterion 5
constexpr std::size_t kBlockInstances = 10000;
constexpr std::size_t kChannelTraces = 100000;  // criterion 6
constexpr double kGofMinP = 1e-3;
constexpr double kNormTol = 1e-10;  // criterion 7
constexpr double kMcSigmas = 4.0;
constexpr std::size_t kMcSamples = 1000000;
constexpr double kDistTarget = 0.625;  // criterion 8
constexpr std::size_t kDistTrials = 2000;
constexpr std::size_t kDistCap = 4096;
constexpr std::uint64_t kDistSeed = 7;
constexpr double kGrowth = 3.0;
constexpr std::uint64_t kSweepSeed = 20240601;

Bits B(const std::string& s) { return Bits::from_string(s); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

ExperimentConfig base_cell(ClassKind kind, Algo algo, std::size_t n, double eps, double c_prime) {
  ExperimentConfig cfg;
  cfg.cls.kind = kind;
  cfg.cls.n = n;
  cfg.cls.epsilon = eps;
  cfg.cls.c_prime = c_prime;
  cfg.cls.q = 0.5;
  cfg.q = 0.5;
  cfg.algo = algo;
  cfg.trials = kTrials;
  cfg.master_seed = kSweepSeed;
  cfg.timing = false;
  return cfg;
}

// The cells of criteria 1-4. q = 1/2 throughout, so p = 1/2.
std::vector<ExperimentConfig> acceptance_cells() {
  const double p = 0.5;
  std::vector<ExperimentConfig> cells;
  cells.push_back(base_cell(ClassKind::GapClass, Algo::Gap, 1 << 14, 0.25, 100 / p));
  cells.push_back(base_cell(ClassKind::PerturbedGap, Algo::GapRobust, 1 << 14, 0.15, 100));
  cells.push_back(base_cell(ClassKind::DenseIntervals, Algo::Majority, 1 << 16, 0.25, 50 / (p * p)));
  cells.push_back(base_cell(ClassKind::AllLongRuns, Algo::LongRuns, 1 << 14, 0.25, 1));
  cells.push_back(base_cell(ClassKind::LongOneRuns, Algo::OneRuns, 1 << 14, 0.25, 6 / p));
  auto robust = base_cell(ClassKind::AllLongRuns, Algo::LongRunsRobust, 1 << 14, 0.25, 1);
  robust.cls.short_runs = 2;
  cells.push_back(robust);
  return cells;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

Outcome rate_outcome(const CellSummary& c, std::size_t need) {
  std::ostringstream os;
  os << c.class_name << "/" << c.algo << " n=" << c.n << " eps=" << c.epsilon << " T=" << c.T << ": "
     << c.successes << "/" << c.trials << " ok, max err " << c.max_error;
  return {c.trials >= kTrials && c.successes >= need, os.str()};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < kMetricPairs; ++i) {
    const auto a = oracle::random_string(rng, rng() % 11);
    const auto b = oracle::random_string(rng, rng() % 11);
    mismatches += edit_distance(B(a), B(b)) == oracle::memo_edit(a, b) ? 0 : 1;
  }
  // The unmemoized recursion on every pair up to length 6.
  std::vector<std::string> all;
  for (std::size_t n = 0; n <= 6; ++n) {
    for (auto& s : oracle::all_strings(n)) all.push_back(s);
  }
  std::size_t grid = 0;
  for (const auto& a : all) {
    for (const auto& b : all) {
      mismatches += edit_distance(B(a), B(b)) == oracle::naive_edit(a, b) ? 0 : 1;
      ++grid;
    }
  }
  std::size_t violations = 0;
  for (std::size_t i = 0; i < kBlockInstances; ++i) {
    const Bits u = B(oracle::random_string(rng, rng() % 17));
    const Bits v = B(oracle::random_string(rng, rng() % 17));
    std::vector<std::size_t> cuts{0, v.size()};
    const std::size_t parts = 1 + rng() % 6;
    for (std::size_t k = 1; k < parts; ++k) cuts.push_back(v.empty() ? 0 : rng() % (v.size() + 1));
    std::sort(cuts.begin(), cuts.end());
    const Partition pv{cuts};
    const std::size_t d = edit_distance(u, v);
    const auto w = partition_edit_witness(u, v, pv);
    violations += min_partition_mismatch_bruteforce(u, v, pv) <= d && w.mismatch_sum <= d ? 0 : 1;
  }
  std::ostringstream os;
  os << mismatches << " distance mismatches over " << kMetricPairs << " random pairs and " << grid
     << " exhaustive pairs; " << violations << " block-bound violations over " << kBlockInstances;
  return {mismatches == 0 && violations == 0, os.str()};
}

Outcome criterion6() {
  const std::size_t n = 100;
  const double q = 0.5;
  std::mt19937_64 rng(6);
  const Bits x = B(oracle::random_string(rng, n));
  const auto ch = ChannelParams::make(q, 6);
  std::vector<std::size_t> hist(n + 1, 0);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < kChannelTraces; ++i) {
    const Bits t = sample_trace(x, ch, i);
    violations += is_subsequence(t, x) ? 0 : 1;
    ++hist[t.size()];
  }
  // Cells: pooled lower tail [0, lo], single lengths, pooled upper tail [hi, n];
  // the tails are cut where their expected counts first reach 5.
  const boost::math::binomial_distribution<double> bin(static_cast<double>(n), 1 - q);
  const double N = static_cast<double>(kChannelTraces);
  auto expect = [&](std::size_t k) { return N * boost::math::pdf(bin, static_cast<double>(k)); };
  std::size_t lo = 0;
  for (double e = expect(0); e < 5; e += expect(++lo)) {}
  std::size_t hi = n;
  for (double e = expect(n); e < 5; e += expect(--hi)) {}
  double chi = 0;
  std::size_t bins = 0;
  auto cell = [&](std::size_t from, std::size_t to) {
    double o = 0, e = 0;
    for (std::size_t k = from; k <= to; ++k) {
      o += static_cast<double>(hist[k]);
      e += expect(k);
    }
    chi += (o - e) * (o - e) / e;
    ++bins;
  };
  cell(0, lo);
  for (std::size_t k = lo + 1; k < hi; ++k) cell(k, k);
  cell(hi, n);
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(bins - 1));
  const double pval = boost::math::cdf(boost::math::complement(dist, chi));
  std::ostringstream os;
  os << violations << " subsequence violations over " << kChannelTraces << " traces; length chi2 = " << chi << " on "
     << bins - 1 << " dof, p = " << pval;
  return {violations == 0 && pval > kGofMinP, os.str()};
}

// Sum of P(t | x) over every distinct subsequence t of x.
double likelihood_mass(const std::string& x, double q) {
  double total = 0;
  for (const auto& [t, mult] : oracle::subsequence_multiset(x)) total += trace_likelihood(B(x), B(t), q);
  return total;
}

Outcome criterion7() {
  double worst = 0;
  std::size_t checked = 0;
  const double qs[] = {0.1, 0.5, 0.9};
  for (std::size_t n = 0; n <= 10; ++n) {
    for (const auto& x : oracle::all_strings(n)) {
      for (double q : qs) {
        worst = std::max(worst, std::abs(likelihood_mass(x, q) - 1.0));
        ++checked;
      }
    }
  }
  std::mt19937_64 rng(7);
  for (std::size_t n = 11; n <= 14; ++n) {
    for (int i = 0; i < 40; ++i) {
      const auto x = oracle::random_string(rng, n);
      worst = std::max(worst, std::abs(likelihood_mass(x, 0.5) - 1.0));
      ++checked;
    }
  }
  double worst_sigma = 0;
  std::size_t outcomes = 0;
  for (const std::string x : {"0110", "01101001", "0001110101"}) {
    const auto ch = ChannelParams::make(0.5, 70 + x.size());
    std::map<std::string, std::size_t> freq;
    for (std::size_t i = 0; i < kMcSamples; ++i) ++freq[sample_trace(B(x), ch, i).to_string()];
    for (const auto& [t, mult] : oracle::subsequence_multiset(x)) {
      const double pr = trace_likelihood(B(x), B(t), 0.5);
      const double sd = std::sqrt(pr * (1 - pr) / static_cast<double>(kMcSamples));
      const double got = static_cast<double>(freq[t]) / static_cast<double>(kMcSamples);
      worst_sigma = std::max(worst_sigma, std::abs(got - pr) / sd);
      ++outcomes;
    }
  }
  std::ostringstream os;
  os << "max |mass - 1| = " << worst << " over " << checked << " (x, q); max deviation " << worst_sigma
     << " sigma over " << outcomes << " trace outcomes";
  return {worst <= kNormTol && worst_sigma <= kMcSigmas, os.str()};
}

Outcome criterion8() {
  std::vector<std::size_t> t_star;
  std::ostringstream os;
  os << "T* for k=2..6:";
  for (std::size_t k = 2; k <= 6; ++k) {
    const auto [a, b] = gen_hard_pair(k);
    const auto r = traces_to_distinguish(LikelihoodModel::make(a, b, 0.5), kDistTarget, kDistTrials, kDistSeed,
                                         kDistCap, 0);
    t_star.push_back(r.t_star.value_or(kDistCap + 1));
    os << " " << (r.t_star ? std::to_string(*r.t_star) : std::string("cap"));
  }
  const bool monotone = std::is_sorted(t_star.begin(), t_star.end());
  const bool growth = static_cast<double>(t_star.back()) >= kGrowth * static_cast<double>(t_star.front());
  os << "; nondecreasing " << (monotone ? "yes" : "no") << ", T*(6) >= 3 T*(2) " << (growth ? "yes" : "no");
  return {monotone && growth, os.str()};
}

Outcome criterion9() {
  std::size_t bad = 0;
  for (std::size_t k = 1; k <= 100; ++k) {
    const auto [a, b] = gen_hamming_pair(k);
    bad += hamming_distance(a, b) == 2 * k ? 0 : 1;
  }
  return {bad == 0, std::to_string(bad) + " of 100 pairs off 2k"};
}

void report(int id, const Outcome& o, const std::string& timing, bool& all_ok) {
  std::printf("%s %d  %s  (%s)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), timing.c_str());
  std::fflush(stdout);
  all_ok = all_ok && o.pass;
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  bool all_ok = true;
  const auto cells = acceptance_cells();

  SweepResult first;
  const double sweep_secs = timed([&] { first = run_cells(cells, 0); });
  const Summary summary = summarize(first);
  {
    std::ofstream f("acceptance_run1.csv", std::ios::binary);
    write_csv(f, first);
  }
  // Criteria 1-4 share one sweep.
  char buf[64];
  std::snprintf(buf, sizeof buf, "shared sweep %.1fs", sweep_secs);
  const std::string shared = buf;
  auto secs = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.1fs", v);
    return std::string(b);
  };

  report(1, rate_outcome(summary.cells[0], kNeedStrict), shared, all_ok);
  {
    Outcome o = rate_outcome(summary.cells[1], kNeedRobust);
    const double p = 1 - cells[1].q;
    o.pass = o.pass && p > 3 * cells[1].cls.epsilon;
    report(2, o, shared, all_ok);
  }
  report(3, rate_outcome(summary.cells[2], kNeedStrict), shared, all_ok);
  {
    Outcome o{true, ""};
    for (std::size_t i = 3; i < 6; ++i) {
      const auto r = rate_outcome(summary.cells[i], kNeedStrict);
      o.pass = o.pass && r.pass;
      o.detail += (i > 3 ? "; " : "") + r.detail;
    }
    report(4, o, shared, all_ok);
  }

  Outcome o;
  double s = timed([&] { o = criterion5(); });
  report(5, o, secs(s), all_ok);
  s = timed([&] { o = criterion6(); });
  report(6, o, secs(s), all_ok);
  s = timed([&] { o = criterion7(); });
  report(7, o, secs(s), all_ok);
  s = timed([&] { o = criterion8(); });
  report(8, o, secs(s), all_ok);
  s = timed([&] { o = criterion9(); });
  report(9, o, secs(s), all_ok);

  // Second full run on a different worker count.
  SweepResult second;
  s = timed([&] { second = run_cells(cells, 2); });
  {
    std::ofstream f("acceptance_run2.csv", std::ios::binary);
    write_csv(f, second);
  }
  const std::string c1 = csv_of(first), c2 = csv_of(second);
  report(10, {c1 == c2, std::to_string(first.rows.size()) + " rows, CSV " + (c1 == c2 ? "identical" : "differs")}, secs(s),
         all_ok);
  return all_ok ? 0 : 1;
}
