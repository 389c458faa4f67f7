#pragma once

// Experiment descriptions, instance/protocol factories, result rows and their
// CSV/JSON renderings, the GRAPH instance format and the benchmark sweep.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "radiobcast/adversary.hpp"
#include "radiobcast/broadcast.hpp"
#include "radiobcast/family_io.hpp"
#include "radiobcast/multi.hpp"
#include "radiobcast/radiosim.hpp"

namespace radiobcast::experiment {

inline constexpr const char* kSchema = "radiobcast-results v1";

enum class Format { csv, json };

struct ExperimentSpec {
  std::string graph = "layered";  // path | star | layered | random | guv | tree | file
  std::string graph_file;
  std::size_t n = 16;
  std::size_t d = 2;
  std::size_t delta = 2;
  std::size_t r = 1;
  Label u = 2, v = 3;  // guv sink in-neighbours
  std::string protocol = "broad-a";
  double alpha = 2.0;
  std::string family = "construct";  // or a SETFAM file
  std::uint64_t seed = 1;
  std::optional<Slot> horizon;
};

inline const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{"broad-a", "broad-b", "prot-alpha", "multi-bb",
                                              "multi-ub", "round-robin", "always", "selective-cycle"};
  return names;
}

inline ChannelMode mode_for(const std::string& protocol) {
  return protocol == "multi-ub" ? ChannelMode::ub : ChannelMode::bb;
}

// ---------------------------------------------------------------------------
// GRAPH n=<n> mode=<bb|ub> sources=<label>:<count>,... edges=<m>
// <u> <v>

inline void write_instance(std::ostream& out, const BroadcastInstance& inst) {
  auto edges = inst.graph.edges();
  out << "GRAPH n=" << inst.graph.size() << " mode=" << to_string(inst.mode) << " sources=";
  for (std::size_t i = 0; i < inst.sources.size(); ++i)
    out << (i ? "," : "") << inst.sources[i].label << ':' << inst.sources[i].count;
  out << " edges=" << edges.size() << '\n';
  for (auto [a, b] : edges) out << a << ' ' << b << '\n';
}

inline BroadcastInstance read_instance(std::istream& in) {
  using io::FormatError;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty graph stream");
  auto kv = io::parse_header(line, "GRAPH");
  std::size_t n = io::to_size(io::field(kv, "n"));
  BroadcastInstance inst{RadioGraph(n), {}, ChannelMode::bb};
  const auto& mode = io::field(kv, "mode");
  if (mode == "ub") inst.mode = ChannelMode::ub;
  else if (mode != "bb") throw FormatError("unknown mode '" + mode + "'");
  std::string src = io::field(kv, "sources");
  std::replace(src.begin(), src.end(), ',', ' ');
  std::istringstream ss(src);
  std::string tok;
  while (ss >> tok) {
    auto colon = tok.find(':');
    if (colon == std::string::npos) throw FormatError("malformed source '" + tok + "'");
    auto label = io::to_size(tok.substr(0, colon));
    if (label == 0 || label > n) throw FormatError("source label outside [1,n]");
    inst.sources.push_back({static_cast<Label>(label), static_cast<std::uint32_t>(io::to_size(tok.substr(colon + 1)))});
  }
  std::size_t m = io::to_size(io::field(kv, "edges"));
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated edge list");
    std::istringstream es(line);
    std::string a, b, extra;
    if (!(es >> a >> b) || (es >> extra)) throw FormatError("malformed edge line '" + line + "'");
    try {
      inst.graph.add_edge(static_cast<Label>(io::to_size(a)), static_cast<Label>(io::to_size(b)));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return inst;
}

inline BroadcastInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open graph file '" + path + "'");
  return read_instance(in);
}

// ---------------------------------------------------------------------------

inline BroadcastInstance make_instance(const ExperimentSpec& s) {
  const ChannelMode mode = mode_for(s.protocol);
  const auto r = static_cast<std::uint32_t>(s.r);
  if (s.r == 0) throw ConfigurationError("r must be >= 1");
  try {
    if (s.graph == "file") {
      auto inst = load_instance(s.graph_file);
      inst.mode = mode;
      return inst;
    }
    if (s.graph == "path") return {graphs::path(s.n), {{1, r}}, mode};
    if (s.graph == "star") return {graphs::star(s.n), {{1, r}}, mode};
    if (s.graph == "layered")
      return {graphs::layered(graphs::even_levels(s.n, s.d), s.delta, s.seed).graph, {{1, r}}, mode};
    if (s.graph == "random") return {graphs::random_indegree(s.n, s.delta, s.seed), {{1, r}}, mode};
    if (s.graph == "guv") {
      for (auto& g : adversary::build_guv_family(s.n, s.r, mode))
        if (g.u == s.u && g.v == s.v) return g.instance;
      throw ConfigurationError("no G_{u,v} with u=" + std::to_string(s.u) + " v=" + std::to_string(s.v));
    }
    if (s.graph == "tree") {
      std::size_t extra = s.n > 2 * s.r + 2 ? s.n - 2 * s.r : 2;
      return adversary::build_tree_multisource(s.r, extra, mode).instance;
    }
  } catch (const io::FormatError& e) {
    throw ConfigurationError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigurationError(e.what());
  }
  throw ConfigurationError("unknown graph generator '" + s.graph + "'");
}

inline protocols::FamilyPtr load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open family file '" + path + "'");
  try {
    return std::make_shared<const setfam::SetFamily>(io::read_family(in));
  } catch (const io::FormatError& e) {
    throw ConfigurationError(std::string("family file: ") + e.what());
  }
}

// n and Δ are the instance's; the protocols receive them as known parameters.
inline std::shared_ptr<ProtocolSchedule> make_protocol(const ExperimentSpec& s, const BroadcastInstance& inst) {
  using namespace protocols;
  const std::size_t n = inst.graph.size();
  const std::size_t delta = std::max<std::size_t>(1, inst.graph.max_in_degree());
  const bool from_file = s.family != "construct";
  auto& cache = setfam::FamilyCache::global();
  if (from_file && s.protocol != "broad-a" && s.protocol != "multi-bb" && s.protocol != "multi-ub" &&
      s.protocol != "selective-cycle")
    throw ConfigurationError(s.protocol + " provisions its own families; --family must be 'construct'");
  if (s.protocol == "broad-a") return broad_a(n, delta, from_file ? load_family(s.family) : cache.selective(n, delta, s.seed));
  if (s.protocol == "broad-b") return BroadB::provisioned(n, s.seed);
  if (s.protocol == "prot-alpha") {
    ProtAlphaOptions o;
    o.seed = s.seed;
    return prot_alpha(s.alpha, o);
  }
  if (s.protocol == "multi-bb" || s.protocol == "multi-ub")
    return multi_broadcast(mode_for(s.protocol), n, delta, from_file ? load_family(s.family) : cache.strong(n, delta + 1));
  if (s.protocol == "round-robin") return round_robin(n);
  if (s.protocol == "always") return always_transmit();
  if (s.protocol == "selective-cycle")
    return selective_cycle(from_file ? load_family(s.family) : cache.selective(n, delta, s.seed));
  throw ConfigurationError("unknown protocol '" + s.protocol + "'");
}

// ---------------------------------------------------------------------------

struct ResultRow {
  std::size_t n = 0;
  std::size_t D = 0;
  std::size_t Delta = 0;
  std::size_t c = 0;
  std::size_t r = 0;
  std::string protocol;
  std::size_t family_size = 0;
  std::optional<Slot> completion_slot;
  std::optional<Slot> termination_slot;
  std::optional<std::uint64_t> phases;
  std::optional<double> wall_time_ms;
  std::string error;  // set when the run could not be carried out
};

inline ResultRow run_experiment(const ExperimentSpec& s, bool stop_early = true) {
  auto inst = make_instance(s);
  auto proto = make_protocol(s, inst);
  auto m = metrics(inst);
  ResultRow row;
  row.n = m.n;
  row.D = m.eccentricity;
  row.Delta = m.max_in_degree;
  row.c = m.congestion;
  row.r = m.r;
  row.protocol = s.protocol;
  row.family_size = proto->family_size();
  RunOptions o;
  o.max_slots = s.horizon;
  o.record_slots = false;
  o.stop_on_completion = stop_early && !proto->self_terminating();
  auto t0 = std::chrono::steady_clock::now();
  auto tr = run(inst, *proto, o);
  row.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  row.completion_slot = tr.completion;
  row.termination_slot = tr.termination;
  if (tr.completion)
    if (auto ph = proto->phase_of(*tr.completion)) row.phases = *ph + 1;
  return row;
}

inline std::string csv_header() { return "n,D,Delta,c,r,protocol,family_size,completion_slot,termination_slot,phases,wall_time_ms"; }

inline std::string opt_text(const std::optional<std::uint64_t>& v, const std::string& none = "none") {
  return v ? std::to_string(*v) : none;
}

inline std::string wall_text(const ResultRow& row, bool timing) {
  if (!timing || !row.wall_time_ms) return "-";
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << *row.wall_time_ms;
  return o.str();
}

inline void write_csv_row(std::ostream& out, const ResultRow& row, bool timing) {
  if (!row.error.empty()) {
    out << row.n << ',' << row.D << ',' << row.Delta << ',' << row.c << ',' << row.r << ',' << row.protocol << ','
        << row.family_size << ",error,error,error,-\n";
    return;
  }
  out << row.n << ',' << row.D << ',' << row.Delta << ',' << row.c << ',' << row.r << ',' << row.protocol << ','
      << row.family_size << ',' << opt_text(row.completion_slot) << ',' << opt_text(row.termination_slot) << ','
      << opt_text(row.phases) << ',' << wall_text(row, timing) << '\n';
}

inline nlohmann::ordered_json row_json(const ResultRow& row, bool timing) {
  auto opt = [](const auto& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["n"] = row.n;
  j["D"] = row.D;
  j["Delta"] = row.Delta;
  j["c"] = row.c;
  j["r"] = row.r;
  j["protocol"] = row.protocol;
  j["family_size"] = row.family_size;
  j["completion_slot"] = opt(row.completion_slot);
  j["termination_slot"] = opt(row.termination_slot);
  j["phases"] = opt(row.phases);
  j["wall_time_ms"] = timing ? opt(row.wall_time_ms) : nlohmann::ordered_json(nullptr);
  if (!row.error.empty()) j["error"] = row.error;
  return j;
}

inline void write_rows(std::ostream& out, const std::vector<ResultRow>& rows, Format f, bool timing) {
  if (f == Format::csv) {
    out << "# " << kSchema << '\n' << csv_header() << '\n';
    for (const auto& r : rows) write_csv_row(out, r, timing);
    return;
  }
  nlohmann::ordered_json doc;
  doc["schema"] = kSchema;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) doc["rows"].push_back(row_json(r, timing));
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

struct BenchGrid {
  std::vector<std::size_t> n, d, delta;
  std::vector<std::string> protocols;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  std::string graph = "layered";
  std::size_t r = 1;
  double alpha = 2.0;
  std::optional<Slot> horizon;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct BenchPoint {
  std::size_t n, d, delta;
  std::string protocol;
};

struct BenchSummary {
  BenchPoint point;
  std::size_t reps = 0;
  std::size_t completed = 0;
  std::optional<double> median_completion;
  std::optional<Slot> max_completion;
};

struct BenchResult {
  std::vector<BenchPoint> points;
  std::vector<ResultRow> rows;  // points.size() * reps, grid order then repetition
  std::vector<BenchSummary> summary;
};

inline BenchResult run_bench(const BenchGrid& g) {
  if (g.n.empty() || g.d.empty() || g.delta.empty() || g.protocols.empty()) throw ConfigurationError("empty benchmark grid");
  if (g.reps == 0) throw ConfigurationError("repetitions must be >= 1");
  for (const auto& p : g.protocols)
    if (std::find(protocol_names().begin(), protocol_names().end(), p) == protocol_names().end())
      throw ConfigurationError("unknown protocol '" + p + "'");
  BenchResult res;
  for (auto n : g.n)
    for (auto d : g.d)
      for (auto dl : g.delta)
        for (const auto& p : g.protocols) res.points.push_back({n, d, dl, p});
  const std::size_t total = res.points.size() * g.reps;
  res.rows.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      const auto& pt = res.points[i / g.reps];
      ExperimentSpec s;
      s.graph = g.graph;
      s.n = pt.n;
      s.d = pt.d;
      s.delta = pt.delta;
      s.r = g.r;
      s.protocol = pt.protocol;
      s.alpha = g.alpha;
      s.horizon = g.horizon;
      s.seed = rng::derive(g.seed, i / g.reps, i % g.reps);
      try {
        res.rows[i] = run_experiment(s);
      } catch (const std::exception& e) {
        ResultRow row;
        row.n = pt.n;
        row.protocol = pt.protocol;
        row.error = e.what();
        res.rows[i] = row;
      }
    }
  };
  unsigned jobs = g.jobs ? g.jobs : std::max(1U, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t p = 0; p < res.points.size(); ++p) {
    BenchSummary s;
    s.point = res.points[p];
    s.reps = g.reps;
    std::vector<Slot> done;
    for (std::size_t k = 0; k < g.reps; ++k)
      if (const auto& row = res.rows[p * g.reps + k]; row.error.empty() && row.completion_slot) done.push_back(*row.completion_slot);
    s.completed = done.size();
    if (!done.empty()) {
      std::sort(done.begin(), done.end());
      std::size_t h = done.size() / 2;
      s.median_completion = done.size() % 2 ? static_cast<double>(done[h]) : (static_cast<double>(done[h - 1]) + done[h]) / 2.0;
      s.max_completion = done.back();
    }
    res.summary.push_back(s);
  }
  return res;
}

inline void write_summary(std::ostream& out, const std::vector<BenchSummary>& summary, Format f) {
  auto med = [](const std::optional<double>& m) {
    if (!m) return std::string("none");
    std::ostringstream o;
    o << std::fixed << std::setprecision(1) << *m;
    return o.str();
  };
  if (f == Format::csv) {
    out << "# " << kSchema << " summary\n";
    out << "n,D,Delta,protocol,reps,completed,median_completion,max_completion\n";
    for (const auto& s : summary)
      out << s.point.n << ',' << s.point.d << ',' << s.point.delta << ',' << s.point.protocol << ',' << s.reps << ','
          << s.completed << ',' << med(s.median_completion) << ',' << opt_text(s.max_completion) << '\n';
    return;
  }
  nlohmann::ordered_json doc;
  doc["schema"] = std::string(kSchema) + " summary";
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& s : summary) {
    nlohmann::ordered_json j;
    j["n"] = s.point.n;
    j["D"] = s.point.d;
    j["Delta"] = s.point.delta;
    j["protocol"] = s.point.protocol;
    j["reps"] = s.reps;
    j["completed"] = s.completed;
    j["median_completion"] = s.median_completion ? nlohmann::ordered_json(*s.median_completion) : nullptr;
    j["max_completion"] = s.max_completion ? nlohmann::ordered_json(*s.max_completion) : nullptr;
    doc["rows"].push_back(j);
  }
  out << doc.dump(2) << '\n';
}

}  // namespace radiobcast::experiment
