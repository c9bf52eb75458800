// tracelab command-line front end.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracelab/bits.hpp"
#include "tracelab/channel.hpp"
#include "tracelab/classes.hpp"
#include "tracelab/distinguish.hpp"
#include "tracelab/edit_distance.hpp"
#include "tracelab/harness.hpp"
#include "tracelab/random.hpp"
#include "tracelab/reconstruct.hpp"

using nlohmann::json;
using namespace tracelab;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "100/p", "50/p^2" or a plain number.
double parse_cprime(const std::string& s, double q) {
  const double p = 1.0 - q;
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return std::stod(s);
    const double k = std::stod(s.substr(0, slash));
    const std::string rest = s.substr(slash + 1);
    if (rest == "p") return k / p;
    if (rest == "p^2" || rest == "p2") return k / (p * p);
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("bad --cprime value: " + s);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Bits read_single(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  auto lines = read_bits_lines(in);
  if (lines.empty()) return Bits{};
  return lines.front();
}

// Writes to `path`, or stderr when path is empty.
void emit_side(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cerr << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text << '\n';
}

json report_json(const ReconReport& r) {
  json j;
  j["status"] = std::string(to_string(r.status));
  j["traces_used"] = r.traces_used;
  j["output_length"] = r.output.size();
  j["estimates"] = r.estimates;
  json th = json::object();
  for (const auto& [k, v] : r.thresholds) th[k] = v;
  j["thresholds"] = th;
  j["per_trace_counts"] = r.per_trace_counts;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json meta_json(const ClassSpec& spec, const Generated& g) {
  json j;
  j["class"] = std::string(to_string(spec.kind));
  j["n"] = spec.n;
  j["epsilon"] = spec.epsilon;
  j["c_prime"] = spec.c_prime;
  j["q"] = spec.q;
  j["seed"] = spec.seed;
  const auto th = class_thresholds(spec);
  j["thresholds"] = {{"log_n", th.log_n},           {"min_run", th.min_run},
                     {"min_one_run", th.min_one_run}, {"short_zero_max", th.short_zero_max},
                     {"long_zero_min", th.long_zero_min}, {"flip_budget", th.flip_budget},
                     {"min_interval", th.min_interval}};
  if (!g.meta.intervals.empty()) {
    json ivs = json::array();
    for (const auto& iv : g.meta.intervals) {
      ivs.push_back({{"begin", iv.begin}, {"length", iv.length}, {"majority", iv.majority ? 1 : 0},
                     {"minority", iv.minority}});
    }
    j["intervals"] = ivs;
  }
  if (g.meta.flips) {
    j["base"] = g.meta.flips->base.to_string();
    j["flips"] = g.meta.flips->per_run;
  }
  const auto diag = validate_class(g.bits, spec, &g.meta);
  j["valid"] = diag.ok;
  if (!diag.ok) j["violation"] = diag.message;
  return j;
}

std::pair<Bits, Bits> parse_pair(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--pair must be hard:k, hamming:k or files:a,b");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "hard" || kind == "hamming") {
    std::size_t k = 0;
    try {
      k = std::stoull(arg);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--pair needs an integer k");
    }
    return kind == "hard" ? gen_hard_pair(k) : gen_hamming_pair(k);
  }
  if (kind == "files") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--pair files:a,b needs two paths");
    return {read_single(arg.substr(0, comma)), read_single(arg.substr(comma + 1))};
  }
  throw std::invalid_argument("unknown pair kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracelab: approximate trace reconstruction over the deletion channel"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a string from a class");
  std::string g_class = "RANDOM", g_cprime = "1", g_meta;
  std::size_t g_n = 0, g_short = 0;
  double g_eps = 0.25, g_q = 0.5, g_lzf = 0.5;
  std::uint64_t g_seed = 0;
  bool g_leading = false, g_adv = false, g_draw_majority = false;
  gen->add_option("--class", g_class, "ALL_LONG_RUNS | LONG_ONE_RUNS | GAP_CLASS | PERTURBED_GAP | DENSE_INTERVALS | RANDOM");
  gen->add_option("--n", g_n, "Length")->required();
  gen->add_option("--epsilon", g_eps);
  gen->add_option("--cprime", g_cprime, "C' as a number, k/p or k/p^2");
  gen->add_option("--q", g_q, "Deletion probability (log base 1/q)");
  gen->add_option("--seed", g_seed);
  gen->add_option("--short-runs", g_short);
  gen->add_option("--long-zero-fraction", g_lzf);
  gen->add_flag("--leading-zero", g_leading, "Allow a leading 0-run (gap classes)");
  gen->add_flag("--adversarial", g_adv, "Flip the first m bits of each run");
  gen->add_flag("--draw-majority", g_draw_majority, "Draw interval majorities independently");
  gen->add_option("--meta", g_meta, "Metadata JSON path (default stderr)");

  // corrupt
  auto* cor = app.add_subcommand("corrupt", "Pass the source on stdin through the deletion channel");
  double c_q = 0.5;
  std::uint64_t c_seed = 0;
  std::size_t c_T = 1;
  cor->add_option("--q", c_q);
  cor->add_option("--seed", c_seed);
  cor->add_option("--traces,--T", c_T, "Traces per input line");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct from traces on stdin");
  std::string r_algo = "gap", r_cprime = "100/p", r_json;
  double r_eps = 0.25, r_q = 0.5;
  std::size_t r_n = 0, r_s = 0;
  rec->add_option("--algo", r_algo, "longruns | longruns-robust | oneruns | gap | gap-robust | majority")->required();
  rec->add_option("--epsilon", r_eps);
  rec->add_option("--cprime", r_cprime);
  rec->add_option("--q", r_q);
  rec->add_option("--n", r_n, "Source length")->required();
  rec->add_option("--s", r_s, "Short-run count for longruns-robust");
  rec->add_option("--json", r_json, "Report JSON path (default stderr)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Edit distance between two files");
  std::string e_a, e_b;
  double e_eps = 0;
  ev->add_option("a", e_a)->required();
  ev->add_option("b", e_b)->required();
  ev->add_option("--epsilon", e_eps, "Also report success against eps * |b|");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run a seeded experiment grid");
  std::string s_config, s_csv, s_summary;
  unsigned s_workers = 0;
  sw->add_option("--config", s_config, "JSON config file")->required();
  sw->add_option("--csv", s_csv, "CSV output path (overrides config; default stdout)");
  sw->add_option("--summary", s_summary, "Summary JSON path (overrides config; default stderr)");
  sw->add_option("--workers", s_workers);

  // distinguish
  auto* di = app.add_subcommand("distinguish", "Traces needed for the ML test to tell a pair apart");
  std::string d_pair = "hard:2";
  double d_q = 0.5, d_target = 0.625;
  std::size_t d_trials = 2000, d_cap = 4096;
  std::uint64_t d_seed = 0;
  unsigned d_workers = 0;
  di->add_option("--pair", d_pair, "hard:k | hamming:k | files:a,b");
  di->add_option("--q", d_q);
  di->add_option("--target", d_target);
  di->add_option("--trials", d_trials);
  di->add_option("--seed", d_seed);
  di->add_option("--t-cap", d_cap);
  di->add_option("--workers", d_workers);

  // summarize
  auto* su = app.add_subcommand("summarize", "Summarize a sweep CSV");
  std::string su_csv;
  su->add_option("csv", su_csv)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto kind = parse_class_kind(g_class);
      if (!kind) throw std::invalid_argument("unknown class " + g_class);
      ClassSpec spec;
      spec.kind = *kind;
      spec.n = g_n;
      spec.epsilon = g_eps;
      spec.q = g_q;
      spec.c_prime = parse_cprime(g_cprime, g_q);
      spec.seed = resolve_master_seed(g_seed);
      spec.short_runs = g_short;
      spec.long_zero_fraction = g_lzf;
      spec.leading_zero_run = g_leading;
      spec.adversarial_flips = g_adv;
      spec.alternate_majority = !g_draw_majority;
      const Generated g = generate(spec);
      write_bits_line(std::cout, g.bits);
      emit_side(g_meta, meta_json(spec, g).dump(2));
    } else if (*cor) {
      const auto lines = read_bits_lines(std::cin);
      if (lines.empty()) throw std::invalid_argument("no source string on stdin");
      const std::uint64_t seed = resolve_master_seed(c_seed);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        // Line i gets its own channel stream.
        const auto ch = ChannelParams::make(c_q, i == 0 ? seed : derive_seed(seed, {i}));
        for (const auto& t : sample_traces(lines[i], ch, c_T)) write_bits_line(std::cout, t);
      }
    } else if (*rec) {
      const auto algo = parse_algo(r_algo);
      if (!algo) throw std::invalid_argument("unknown algorithm " + r_algo);
      const TraceSet traces = read_bits_lines(std::cin);
      const double p = 1.0 - r_q;
      ReconReport rep;
      switch (*algo) {
        case Algo::LongRuns: rep = recon_long_runs(traces, p); break;
        case Algo::LongRunsRobust: rep = recon_long_runs_robust(traces, r_s, p); break;
        case Algo::OneRuns:
          if (traces.empty()) throw std::invalid_argument("no trace on stdin");
          rep = recon_one_runs(traces.front(), r_eps, p, r_q, r_n);
          break;
        case Algo::Gap: rep = recon_gap(traces, GapParams::make(r_eps, parse_cprime(r_cprime, r_q), r_q, r_n)); break;
        case Algo::GapRobust:
          rep = recon_gap_robust(traces, GapParams::make(r_eps, parse_cprime(r_cprime, r_q), r_q, r_n));
          break;
        case Algo::Majority:
          if (traces.empty()) throw std::invalid_argument("no trace on stdin");
          rep = recon_majority(traces.front(), r_eps, p, r_q, r_n);
          break;
      }
      write_bits_line(std::cout, rep.output);
      emit_side(r_json, report_json(rep).dump(2));
    } else if (*ev) {
      const Bits a = read_single(e_a);
      const Bits b = read_single(e_b);
      const std::size_t d = edit_distance(a, b);
      json j{{"edit_distance", d}, {"len_a", a.size()}, {"len_b", b.size()}};
      if (e_eps > 0 && !b.empty()) {
        j["normalized_error"] = static_cast<double>(d) / static_cast<double>(b.size());
        j["success"] = static_cast<double>(d) <= e_eps * static_cast<double>(b.size());
      }
      std::cout << j.dump(2) << '\n';
    } else if (*sw) {
      SweepFile cfg = parse_sweep_config(slurp(s_config));
      if (!s_csv.empty()) cfg.csv_path = s_csv;
      if (!s_summary.empty()) cfg.summary_path = s_summary;
      const SweepResult res = run_sweep(cfg.grid, s_workers != 0 ? s_workers : cfg.workers);
      if (cfg.csv_path.empty()) {
        write_csv(std::cout, res);
      } else {
        std::ofstream out(cfg.csv_path);
        if (!out) throw IoError("cannot write " + cfg.csv_path);
        write_csv(out, res);
      }
      emit_side(cfg.summary_path, summary_json(res, summarize(res)));
    } else if (*di) {
      auto [a, b] = parse_pair(d_pair);
      const auto model = LikelihoodModel::make(a, b, d_q);
      const auto res = traces_to_distinguish(model, d_target, d_trials, resolve_master_seed(d_seed), d_cap, d_workers);
      json j;
      j["pair"] = {a.to_string(), b.to_string()};
      j["T_star"] = res.t_star ? json(*res.t_star) : json("cap");
      json curve = json::array();
      for (const auto& pt : res.curve) curve.push_back({pt.t_count, pt.success, pt.half_width});
      j["success_curve"] = curve;
      std::cout << j.dump(2) << '\n';
    } else if (*su) {
      std::ifstream in(su_csv);
      if (!in) throw IoError("cannot read " + su_csv);
      const SweepResult res = read_csv(in);
      std::cout << summary_json(res, summarize(res)) << '\n';
    }
  } catch (const IoError& e) {
    std::cerr << "tracelab: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "tracelab: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
