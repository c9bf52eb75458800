#include "tracelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tracelab/channel.hpp"
#include "tracelab/edit_distance.hpp"
#include "tracelab/random.hpp"

namespace tracelab {

namespace {

using nlohmann::json;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string num(double v) { return fmt("%.10g", v); }

std::size_t formula_trace_count(const ExperimentConfig& cfg) {
  const double p = 1.0 - cfg.q;
  const double eps = cfg.cls.epsilon;
  switch (cfg.algo) {
    case Algo::LongRuns:
      return trace_count(eps, p, cfg.q, cfg.cls.n, TraceVariant::LongRuns);
    case Algo::LongRunsRobust: {
      // Each short run survives in a trace with probability p.
      const double base = static_cast<double>(trace_count(eps, p, cfg.q, cfg.cls.n, TraceVariant::LongRuns));
      return ceil_tolerant(base * std::pow(1.0 / p, static_cast<double>(cfg.cls.short_runs)));
    }
    case Algo::Gap:
      return trace_count(eps, p, cfg.q, cfg.cls.n, TraceVariant::Gap);
    case Algo::GapRobust:
      return trace_count(eps, p, cfg.q, cfg.cls.n, TraceVariant::Robust);
    case Algo::OneRuns:
    case Algo::Majority:
      return 1;
  }
  return 1;
}

bool single_trace(Algo a) { return a == Algo::OneRuns || a == Algo::Majority; }

ReconReport reconstruct(const ExperimentConfig& cfg, const DerivedParams& d, const TraceSet& traces) {
  const double p = 1.0 - cfg.q;
  switch (cfg.algo) {
    case Algo::LongRuns: return recon_long_runs(traces, p);
    case Algo::LongRunsRobust: return recon_long_runs_robust(traces, cfg.cls.short_runs, p);
    case Algo::OneRuns: return recon_one_runs_with_threshold(traces.front(), *d.one_runs_L, p);
    case Algo::Gap: return recon_gap(traces, *d.gap);
    case Algo::GapRobust: return recon_gap_robust(traces, *d.gap);
    case Algo::Majority: return recon_majority_window(traces.front(), *d.majority_w, p);
  }
  throw std::invalid_argument("unknown algorithm");
}

unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

json derived_json(const ExperimentConfig& cfg) {
  json j;
  try {
    const DerivedParams d = derive_params(cfg);
    j["T"] = d.T;
    if (d.gap) {
      j["L"] = d.gap->L;
      j["m"] = d.gap->m;
      j["a"] = d.gap->a;
      j["G_bar"] = d.gap->g_bar;
    }
    if (d.one_runs_L) j["L"] = *d.one_runs_L;
    if (d.majority_L) j["L"] = *d.majority_L;
    if (d.majority_w) j["w"] = *d.majority_w;
    const auto& t = d.thresholds;
    j["class_thresholds"] = {{"log_n", t.log_n},
                             {"min_run", t.min_run},
                             {"min_one_run", t.min_one_run},
                             {"short_zero_max", t.short_zero_max},
                             {"long_zero_min", t.long_zero_min},
                             {"flip_budget", t.flip_budget},
                             {"min_interval", t.min_interval},
                             {"density_floor", t.density_floor}};
  } catch (const std::exception& e) {
    j["error"] = e.what();
  }
  return j;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["class"] = {{"kind", std::string(to_string(cfg.cls.kind))},
                {"n", cfg.cls.n},
                {"epsilon", cfg.cls.epsilon},
                {"c_prime", cfg.cls.c_prime},
                {"short_runs", cfg.cls.short_runs},
                {"long_zero_fraction", cfg.cls.long_zero_fraction},
                {"leading_zero_run", cfg.cls.leading_zero_run},
                {"adversarial_flips", cfg.cls.adversarial_flips},
                {"alternate_majority", cfg.cls.alternate_majority}};
  j["algo"] = std::string(to_string(cfg.algo));
  j["q"] = cfg.q;
  j["trials"] = cfg.trials;
  j["T"] = cfg.trace_override ? json(*cfg.trace_override) : json("formula");
  if (cfg.recon_c_prime) j["recon_c_prime"] = *cfg.recon_c_prime;
  j["seed"] = cfg.master_seed;
  j["timing"] = cfg.timing;
  j["derived"] = derived_json(cfg);
  return j;
}

// Accepts a number, "<k>/p" or "<k>/p^2".
double parse_c_prime(const json& v, double q) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw std::invalid_argument("c_prime must be a number or a string like \"100/p\"");
  const std::string s = v.get<std::string>();
  const double p = 1.0 - q;
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  const double k = std::stod(s.substr(0, slash));
  const std::string rest = s.substr(slash + 1);
  if (rest == "p") return k / p;
  if (rest == "p^2" || rest == "p2") return k / (p * p);
  throw std::invalid_argument("unsupported c_prime expression: " + s);
}

template <typename T>
std::vector<T> axis(const json& doc, const char* key, std::vector<T> fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<T>());
  } else {
    out.push_back(v.get<T>());
  }
  if (out.empty()) throw std::invalid_argument(std::string("grid axis '") + key + "' is empty");
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string_view to_string(Algo algo) noexcept {
  switch (algo) {
    case Algo::LongRuns: return "longruns";
    case Algo::LongRunsRobust: return "longruns-robust";
    case Algo::OneRuns: return "oneruns";
    case Algo::Gap: return "gap";
    case Algo::GapRobust: return "gap-robust";
    case Algo::Majority: return "majority";
  }
  return "unknown";
}

std::optional<Algo> parse_algo(std::string_view name) noexcept {
  for (auto a : {Algo::LongRuns, Algo::LongRunsRobust, Algo::OneRuns, Algo::Gap, Algo::GapRobust, Algo::Majority}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (cls.n == 0) throw std::invalid_argument("n must be >= 1");
  if (!(cls.epsilon > 0.0 && cls.epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(cls.c_prime > 0.0)) throw std::invalid_argument("c_prime must be positive");
  if (!(cls.long_zero_fraction >= 0.0 && cls.long_zero_fraction <= 1.0)) {
    throw std::invalid_argument("long_zero_fraction must lie in [0, 1]");
  }
  if (allow_unchecked_q) {
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in [0, 1)");
  } else if (!(q >= ChannelParams::kMinQ && q <= ChannelParams::kMaxQ)) {
    throw std::invalid_argument("q must lie in [0.05, 0.95]");
  }
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (trace_override && *trace_override == 0) throw std::invalid_argument("T must be >= 1");
  if (recon_c_prime && !(*recon_c_prime > 0.0)) throw std::invalid_argument("recon_c_prime must be positive");
}

DerivedParams derive_params(const ExperimentConfig& cfg) {
  cfg.validate();
  DerivedParams d;
  ClassSpec spec = cfg.cls;
  spec.q = cfg.q;
  // q = 0 has no log base; the noiseless bypass measures logs in base 2.
  const bool noiseless = cfg.q == 0.0;
  if (noiseless) spec.q = 0.5;
  d.thresholds = class_thresholds(spec);
  const double p = 1.0 - cfg.q;
  if (cfg.trace_override) {
    d.T = *cfg.trace_override;
  } else if (noiseless) {
    d.T = 1;
  } else {
    d.T = formula_trace_count(cfg);
  }
  if (single_trace(cfg.algo)) d.T = 1;

  const double log_n = log_inv_q(static_cast<double>(cfg.cls.n), spec.q);
  const double eps = cfg.cls.epsilon;
  switch (cfg.algo) {
    case Algo::Gap:
    case Algo::GapRobust: {
      const double c = cfg.recon_c_prime.value_or(cfg.cls.c_prime);
      if (noiseless) {
        GapParams g;
        g.epsilon = eps;
        g.c_prime = c;
        g.q = 0.0;
        g.p = 1.0;
        g.n = cfg.cls.n;
        g.log_n = log_n;
        g.L = std::max<std::size_t>(1, ceil_tolerant(2.0 * c * log_n));
        g.m = floor_tolerant(eps * c * log_n);
        g.a = std::max<std::size_t>(1, ceil_tolerant(c * log_n));
        g.g_bar = 2.0 * c * log_n;
        d.gap = g;
      } else {
        d.gap = GapParams::make(eps, c, cfg.q, cfg.cls.n);
      }
      d.gap->T = d.T;
      break;
    }
    case Algo::OneRuns:
      d.one_runs_L = std::max<std::size_t>(1, ceil_tolerant(log_n / (10.0 * eps)));
      break;
    case Algo::Majority: {
      const std::size_t L = ceil_tolerant(50.0 * log_n / (p * p * eps * eps));
      d.majority_L = L;
      d.majority_w = std::max<std::size_t>(1, round_length(eps * p * static_cast<double>(L)));
      break;
    }
    case Algo::LongRuns:
    case Algo::LongRunsRobust:
      break;
  }
  return d;
}

std::size_t verify_distance(const Bits& output, const Bits& source, double epsilon) {
  const std::size_t band = 2 * std::max<std::size_t>(1, ceil_tolerant(epsilon * static_cast<double>(source.size())));
  if (auto d = edit_distance_banded(output, source, band)) return *d;
  return edit_distance(output, source);
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t cell_id, std::size_t trial) {
  TrialRecord rec;
  rec.cell_id = cell_id;
  rec.trial = trial;
  rec.seed = derive_seed(cfg.master_seed, {cell_id, trial});
  const auto start = std::chrono::steady_clock::now();
  try {
    const DerivedParams d = derive_params(cfg);
    ClassSpec spec = cfg.cls;
    spec.q = cfg.q == 0.0 ? 0.5 : cfg.q;
    spec.seed = derive_seed(rec.seed, {0});
    const Generated g = generate(spec);

    const auto ch = cfg.allow_unchecked_q ? ChannelParams::unchecked_for_testing(cfg.q, derive_seed(rec.seed, {1}))
                                          : ChannelParams::make(cfg.q, derive_seed(rec.seed, {1}));
    const TraceSet traces = sample_traces(g.bits, ch, d.T);
    const ReconReport rep = reconstruct(cfg, d, traces);

    rec.traces_used = rep.traces_used;
    rec.status = std::string(to_string(rep.status));
    rec.edit_distance = verify_distance(rep.output, g.bits, cfg.cls.epsilon);
    rec.normalized_error = static_cast<double>(rec.edit_distance) / static_cast<double>(g.bits.size());
    rec.success = rep.status == ReconStatus::Ok &&
                  static_cast<double>(rec.edit_distance) <= cfg.cls.epsilon * static_cast<double>(g.bits.size());
    rec.message = rep.note;
  } catch (const std::exception& e) {
    rec.status = "ERROR";
    rec.success = false;
    rec.message = e.what();
  }
  if (cfg.timing) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<ExperimentConfig> SweepGrid::cells() const {
  std::vector<ExperimentConfig> out;
  const std::vector<std::size_t> ns = n.empty() ? std::vector<std::size_t>{base.cls.n} : n;
  const std::vector<double> es = epsilon.empty() ? std::vector<double>{base.cls.epsilon} : epsilon;
  const std::vector<std::optional<std::size_t>> ts =
      T.empty() ? std::vector<std::optional<std::size_t>>{base.trace_override} : T;
  const std::vector<double> qs = q.empty() ? std::vector<double>{base.q} : q;
  const std::vector<Algo> as = algo.empty() ? std::vector<Algo>{base.algo} : algo;
  for (auto nv : ns)
    for (auto ev : es)
      for (const auto& tv : ts)
        for (auto qv : qs)
          for (auto av : as) {
            ExperimentConfig c = base;
            c.cls.n = nv;
            c.cls.epsilon = ev;
            c.trace_override = tv;
            c.q = qv;
            c.algo = av;
            out.push_back(c);
          }
  return out;
}

SweepResult run_sweep(const SweepGrid& grid, unsigned workers) { return run_cells(grid.cells(), workers); }

SweepResult run_cells(const std::vector<ExperimentConfig>& cells, unsigned workers) {
  if (cells.empty()) throw std::invalid_argument("sweep grid has no cells");
  for (const auto& c : cells) c.validate();
  SweepResult res;
  res.cells = cells;

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t t = 0; t < cells[c].trials; ++t) tasks.emplace_back(c, t);
  }
  res.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const auto [c, t] = tasks[i];
      res.rows[i] = run_trial(cells[c], c, t);
    }
  };
  const unsigned w = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < w; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return res;
}

Summary summarize(const SweepResult& result) {
  Summary s;
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const ExperimentConfig& cfg = result.cells[c];
    CellSummary cs;
    cs.cell_id = c;
    cs.class_name = result.class_known ? std::string(to_string(cfg.cls.kind)) : "-";
    cs.algo = std::string(to_string(cfg.algo));
    cs.n = cfg.cls.n;
    cs.epsilon = cfg.cls.epsilon;
    cs.q = cfg.q;
    double err_sum = 0;
    for (const auto& r : result.rows) {
      if (r.cell_id != c) continue;
      ++cs.trials;
      cs.successes += r.success ? 1 : 0;
      cs.T = std::max(cs.T, r.traces_used);
      err_sum += r.normalized_error;
      cs.max_error = std::max(cs.max_error, r.normalized_error);
      ++cs.status_counts[r.status];
    }
    if (cs.trials == 0) {
      s.warnings.push_back("cell " + std::to_string(c) + " has no trials; omitted");
      continue;
    }
    if (result.class_known) {
      try {
        cs.T = derive_params(cfg).T;
      } catch (const std::exception&) {
      }
    }
    const auto n = static_cast<double>(cs.trials);
    cs.rate = static_cast<double>(cs.successes) / n;
    cs.ci_half_width = 1.96 * std::sqrt(cs.rate * (1.0 - cs.rate) / n);
    cs.mean_error = err_sum / n;
    s.cells.push_back(std::move(cs));
  }
  return s;
}

void write_csv(std::ostream& os, const SweepResult& result) {
  os << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    const ExperimentConfig& cfg = result.cells.at(r.cell_id);
    std::size_t T = r.traces_used;
    if (result.class_known) {
      try {
        T = derive_params(cfg).T;
      } catch (const std::exception&) {
      }
    }
    os << r.cell_id << ',' << cfg.cls.n << ',' << num(cfg.cls.epsilon) << ',' << num(cfg.q) << ','
       << to_string(cfg.algo) << ',' << T << ',' << r.trial << ',' << r.seed << ',' << r.status << ','
       << r.edit_distance << ',' << fmt("%.6f", r.normalized_error) << ',' << fmt("%.3f", r.wall_ms) << '\n';
  }
}

SweepResult read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header: " + line);
  SweepResult res;
  res.class_known = false;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw std::runtime_error("CSV line " + std::to_string(lineno) + ": expected 12 fields");
    try {
      TrialRecord r;
      r.cell_id = std::stoull(f[0]);
      r.trial = std::stoull(f[6]);
      r.seed = std::stoull(f[7]);
      r.status = f[8];
      r.edit_distance = std::stoull(f[9]);
      r.normalized_error = std::stod(f[10]);
      r.wall_ms = std::stod(f[11]);
      r.traces_used = std::stoull(f[5]);
      ExperimentConfig cfg;
      cfg.cls.n = std::stoull(f[1]);
      cfg.cls.epsilon = std::stod(f[2]);
      cfg.q = std::stod(f[3]);
      const auto algo = parse_algo(f[4]);
      if (!algo) throw std::runtime_error("unknown algo " + f[4]);
      cfg.algo = *algo;
      cfg.trace_override = r.traces_used;
      r.success = r.status == "OK" &&
                  static_cast<double>(r.edit_distance) <= cfg.cls.epsilon * static_cast<double>(cfg.cls.n);
      if (res.cells.size() <= r.cell_id) res.cells.resize(r.cell_id + 1);
      res.cells[r.cell_id] = cfg;
      res.rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw std::runtime_error("CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return res;
}

std::string config_json(const ExperimentConfig& cfg) { return config_to_json(cfg).dump(2); }

std::string summary_json(const SweepResult& result, const Summary& summary) {
  json doc;
  json cells = json::array();
  for (const auto& cs : summary.cells) {
    json c;
    c["cell_id"] = cs.cell_id;
    if (result.class_known) c["config"] = config_to_json(result.cells.at(cs.cell_id));
    c["class"] = cs.class_name;
    c["algo"] = cs.algo;
    c["n"] = cs.n;
    c["epsilon"] = cs.epsilon;
    c["q"] = cs.q;
    c["T"] = cs.T;
    c["trials"] = cs.trials;
    c["successes"] = cs.successes;
    c["success_rate"] = cs.rate;
    c["ci95_half_width"] = cs.ci_half_width;
    c["mean_normalized_error"] = cs.mean_error;
    c["max_normalized_error"] = cs.max_error;
    c["status_counts"] = cs.status_counts;
    cells.push_back(std::move(c));
  }
  doc["cells"] = std::move(cells);
  doc["warnings"] = summary.warnings;
  return doc.dump(2);
}

SweepFile parse_sweep_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  SweepFile out;
  ExperimentConfig& base = out.grid.base;
  try {
    const json cls = doc.value("class", json::object());
    const std::string kind = cls.value("kind", std::string("RANDOM"));
    const auto k = parse_class_kind(kind);
    if (!k) throw std::invalid_argument("unknown class kind: " + kind);
    base.cls.kind = *k;
    base.cls.short_runs = cls.value("short_runs", std::size_t{0});
    base.cls.long_zero_fraction = cls.value("long_zero_fraction", 0.5);
    base.cls.leading_zero_run = cls.value("leading_zero_run", false);
    base.cls.adversarial_flips = cls.value("adversarial_flips", false);
    base.cls.alternate_majority = cls.value("alternate_majority", true);

    out.grid.n = axis<std::size_t>(doc, "n", {});
    out.grid.epsilon = axis<double>(doc, "epsilon", {0.25});
    out.grid.q = axis<double>(doc, "q", {0.5});
    if (out.grid.n.empty()) throw std::invalid_argument("config needs \"n\"");
    base.cls.n = out.grid.n.front();
    base.cls.epsilon = out.grid.epsilon.front();
    base.q = out.grid.q.front();

    for (const auto& name : axis<std::string>(doc, "algo", {"gap"})) {
      const auto a = parse_algo(name);
      if (!a) throw std::invalid_argument("unknown algorithm: " + name);
      out.grid.algo.push_back(*a);
    }
    if (doc.contains("T")) {
      const json& tv = doc.at("T");
      const json arr = tv.is_array() ? tv : json::array({tv});
      for (const auto& e : arr) {
        if (e.is_string()) {
          if (e.get<std::string>() != "formula") throw std::invalid_argument("T must be an integer or \"formula\"");
          out.grid.T.push_back(std::nullopt);
        } else {
          out.grid.T.push_back(e.get<std::size_t>());
        }
      }
    }
    if (cls.contains("c_prime") && out.grid.q.size() > 1 && cls.at("c_prime").is_string()) {
      throw std::invalid_argument("a p-relative c_prime needs a single q value");
    }
    base.cls.c_prime = cls.contains("c_prime") ? parse_c_prime(cls.at("c_prime"), base.q) : 1.0;
    if (doc.contains("recon_c_prime")) base.recon_c_prime = parse_c_prime(doc.at("recon_c_prime"), base.q);
    base.trials = doc.value("trials", std::size_t{100});
    base.master_seed = resolve_master_seed(doc.value("seed", std::uint64_t{0}));
    base.timing = doc.value("timing", true);
    out.workers = doc.value("workers", 0u);
    out.csv_path = doc.value("csv", std::string());
    out.summary_path = doc.value("summary", std::string());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config field: ") + e.what());
  }
  for (const auto& c : out.grid.cells()) c.validate();
  return out;
}

std::uint64_t resolve_master_seed(std::uint64_t configured) {
  const char* env = std::getenv("TRACELAB_SEED");
  if (env == nullptr || *env == '\0') return configured;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') throw std::invalid_argument(std::string("TRACELAB_SEED is not an integer: ") + env);
  return v;
}

}  // namespace tracelab
