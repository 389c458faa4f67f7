#pragma once

// Lower-bound instances. The layered construction delays an oblivious
// protocol level by level: after level L_j is informed, the adversary picks
// L_j among the unassigned nodes so that no transmit set of the following
// slots contains exactly one of its members, which keeps the next level
// uninformed for that many slots. Every level carries a certificate that
// validate_certificate re-checks by simulation.

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "radiobcast/family_io.hpp"
#include "radiobcast/radiosim.hpp"

namespace radiobcast::adversary {

enum class Variant { general, degree };

inline std::string to_string(Variant v) { return v == Variant::general ? "general" : "degree"; }

struct LevelCertificate {
  std::size_t level = 0;       // j: L_j stays unselected
  Slot start = 0;              // first slot of the window
  std::size_t window = 0;      // T'_{j+1}
  std::vector<Label> subset;   // L_j
  std::vector<LabelSet> sets;  // transmitters among the then-unassigned nodes, one per window slot
  friend bool operator==(const LevelCertificate&, const LevelCertificate&) = default;
};

struct LayeredAdversarialGraph {
  std::size_t n = 0;
  std::size_t depth = 0;  // D
  Variant variant = Variant::general;
  std::size_t delta = 0;
  Label source = 1;
  std::vector<std::vector<Label>> levels;  // L_0 .. L_D
  std::vector<std::size_t> windows;        // windows[j] = T'_j; windows[0] = 0
  std::vector<LevelCertificate> certificates;
  std::vector<std::string> diagnostics;
  bool partial = false;  // some level's subset search was not exhaustive
  RadioGraph graph;

  std::size_t certified_total() const { return std::accumulate(windows.begin(), windows.end(), std::size_t{0}); }

  friend bool operator==(const LayeredAdversarialGraph&, const LayeredAdversarialGraph&) = default;
};

struct AdversaryOptions {
  Variant variant = Variant::general;
  std::size_t delta = 0;            // degree variant only
  std::uint64_t budget = 2'000'000;  // subset evaluations per level
  std::size_t max_window = 0;       // 0: 4n
  std::uint64_t seed = 0;           // local search restarts
};

inline constexpr std::uint64_t kExactEnumerationLimit = 2'000'000;

namespace detail {

inline RadioGraph layered_graph(std::size_t n, const std::vector<std::vector<Label>>& levels) {
  RadioGraph g(n);
  for (std::size_t j = 1; j < levels.size(); ++j)
    for (Label u : levels[j - 1])
      for (Label v : levels[j]) g.add_edge(u, v);
  return g;
}

struct Candidate {
  std::vector<Label> members;
  std::size_t score = 0;
  bool valid = false;

  // Longer survival first, then fewer members, then lexicographically least.
  bool beats(const Candidate& o) const {
    if (!o.valid) return true;
    if (score != o.score) return score > o.score;
    if (members.size() != o.members.size()) return members.size() < o.members.size();
    return members < o.members;
  }
};

// Survival of a subset: number of leading window slots in which it is not
// selected. cols[i] marks the window slots in which R[i] transmits.
class SubsetSearch {
 public:
  SubsetSearch(const std::vector<Label>& pool, const std::vector<BitVector>& cols, std::size_t window, std::size_t cap,
               std::uint64_t budget)
      : pool_(pool), cols_(cols), window_(window), cap_(cap), budget_(budget) {}

  std::uint64_t spent() const { return spent_; }

  Candidate exhaustive() {
    Candidate best;
    std::vector<std::size_t> idx;
    dfs(0, OnesTwos(words()), idx, best);
    return best;
  }

  Candidate local(std::uint64_t seed) {
    rng::Engine g(seed);
    Candidate best;
    while (spent_ < budget_) {
      std::vector<bool> in(pool_.size(), false);
      std::size_t size = 1 + static_cast<std::size_t>(rng::below(g, cap_));
      std::vector<std::size_t> order(pool_.size());
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = 0; i < size; ++i) std::swap(order[i], order[i + rng::below(g, order.size() - i)]);
      for (std::size_t i = 0; i < size; ++i) in[order[i]] = true;
      Candidate cur = evaluate(in);
      for (bool improved = true; improved && spent_ < budget_;) {
        improved = false;
        Candidate step = cur;
        std::vector<bool> step_in = in;
        auto consider = [&](std::vector<bool>& trial) {
          Candidate c = evaluate(trial);
          if (c.beats(step)) {
            step = c;
            step_in = trial;
          }
        };
        std::size_t count = static_cast<std::size_t>(std::count(in.begin(), in.end(), true));
        for (std::size_t a = 0; a < pool_.size() && spent_ < budget_; ++a) {
          std::vector<bool> trial = in;
          trial[a] = !trial[a];
          std::size_t c2 = in[a] ? count - 1 : count + 1;
          if (c2 >= 1 && c2 <= cap_) consider(trial);
          if (!in[a]) continue;
          for (std::size_t b = 0; b < pool_.size() && spent_ < budget_; ++b) {
            if (in[b]) continue;
            std::vector<bool> sw = in;
            sw[a] = false;
            sw[b] = true;
            consider(sw);
          }
        }
        if (step.beats(cur)) {
          cur = step;
          in = step_in;
          improved = true;
        }
      }
      if (cur.beats(best)) best = cur;
    }
    return best;
  }

 private:
  std::size_t words() const { return (window_ + 63) / 64; }

  std::size_t survival(const OnesTwos& acc) const { return acc.first_one(window_); }

  Candidate evaluate(const std::vector<bool>& in) {
    ++spent_;
    OnesTwos acc(words());
    Candidate c;
    for (std::size_t i = 0; i < pool_.size(); ++i)
      if (in[i]) {
        acc = acc.with(cols_[i]);
        c.members.push_back(pool_[i]);
      }
    c.score = survival(acc);
    c.valid = true;
    return c;
  }

  void dfs(std::size_t from, const OnesTwos& acc, std::vector<std::size_t>& idx, Candidate& best) {
    for (std::size_t i = from; i < pool_.size(); ++i) {
      if (++spent_ > budget_) throw BudgetExceeded("unselected-subset enumeration", spent_ - 1);
      OnesTwos next = acc.with(cols_[i]);
      idx.push_back(i);
      Candidate c;
      c.score = survival(next);
      c.valid = true;
      if (!best.valid || c.score > best.score || (c.score == best.score && idx.size() < best.members.size())) {
        for (auto k : idx) c.members.push_back(pool_[k]);
        best = std::move(c);
      }
      if (idx.size() < cap_) dfs(i + 1, next, idx, best);
      idx.pop_back();
    }
  }

  const std::vector<Label>& pool_;
  const std::vector<BitVector>& cols_;
  std::size_t window_, cap_;
  std::uint64_t budget_;
  std::uint64_t spent_ = 0;
};

inline std::optional<Slot> level_arrival(const SimTrace& tr, const std::vector<Label>& level) {
  std::optional<Slot> best;
  for (Label v : level)
    for (const auto& s : tr.first_reception.at(v))
      if (s && (!best || *s < *best)) best = s;
  return best;
}

}  // namespace detail

inline LayeredAdversarialGraph build_single_lb_graph(const ProtocolSchedule& protocol, std::size_t n, std::size_t depth,
                                                     const AdversaryOptions& opts = {}) {
  if (!protocol.oblivious()) throw ConfigurationError(protocol.name() + " is not oblivious");
  if (opts.budget == 0) throw ConfigurationError("search budget must be positive");
  if (depth == 0 || n < depth + 1) throw ConfigurationError("need D >= 1 and n >= D + 1");
  std::size_t cap = 0;
  if (opts.variant == Variant::general) {
    if (6 * depth > n && depth > 1) throw ConfigurationError("general variant needs D <= n/6");
    cap = std::max<std::size_t>(1, n / (2 * depth));
  } else {
    if (opts.delta == 0) throw ConfigurationError("degree variant needs delta >= 1");
    if (opts.delta * depth > n) throw ConfigurationError("degree variant needs delta <= n/D");
    cap = opts.delta;
  }
  const std::size_t max_window = opts.max_window ? opts.max_window : 4 * n;

  LayeredAdversarialGraph out;
  out.n = n;
  out.depth = depth;
  out.variant = opts.variant;
  out.delta = opts.variant == Variant::degree ? opts.delta : 0;
  out.levels.push_back({1});
  out.windows = {0, 0};
  std::vector<Label> rest;
  for (std::size_t v = 2; v <= n; ++v) rest.push_back(static_cast<Label>(v));

  bool reachable = true;
  for (std::size_t j = 1; j < depth; ++j) {
    std::size_t room = std::min(cap, rest.size() - (depth - j));
    auto levels = out.levels;
    levels.push_back(rest);
    auto inst = BroadcastInstance::single(detail::layered_graph(n, levels), 1);

    std::optional<Slot> arrival;
    if (reachable) {
      RunOptions probe;
      probe.record_slots = false;
      probe.stop_on_completion = true;
      probe.max_slots = default_horizon(n) + out.certified_total() + depth * (max_window + 1);
      arrival = detail::level_arrival(run(inst, protocol, probe), rest);
    }
    if (!arrival) {
      reachable = false;
      out.diagnostics.push_back("level " + std::to_string(j) + " not reached within the horizon; no delay certified");
      out.levels.push_back({rest.front()});
      rest.erase(rest.begin());
      out.windows.push_back(0);
      continue;
    }

    RunOptions rec;
    rec.max_slots = *arrival + 1 + max_window;
    rec.stop_on_termination = false;
    rec.stop_on_quiescence = false;
    auto tr = run(inst, protocol, rec);
    const Slot start = *arrival + 1;
    const std::size_t window = static_cast<std::size_t>(std::min<Slot>(max_window, tr.slots.size() - start));
    std::vector<LabelSet> sets;
    std::vector<BitVector> cols(rest.size(), BitVector(window));
    for (std::size_t w = 0; w < window; ++w) {
      LabelSet f(n);
      for (Label x : tr.transmitters(start + w)) f.insert(x);
      for (std::size_t i = 0; i < rest.size(); ++i)
        if (f.contains(rest[i])) cols[i].set(w);
      LabelSet fr(n);
      for (Label x : rest)
        if (f.contains(x)) fr.insert(x);
      sets.push_back(std::move(fr));
    }

    detail::SubsetSearch search(rest, cols, window, room, opts.budget);
    detail::Candidate best;
    bool exact = setfam::subsets_up_to(rest.size(), room) <= std::min(opts.budget, kExactEnumerationLimit);
    if (exact) best = search.exhaustive();
    else {
      out.partial = true;
      best = search.local(rng::derive(opts.seed, j));
    }
    if (best.score == 0)
      out.diagnostics.push_back("level " + std::to_string(j) + ": every candidate is selected at slot " +
                                std::to_string(start) + "; T' = 0");

    LevelCertificate cert;
    cert.level = j;
    cert.start = start;
    cert.window = best.score;
    cert.subset = best.members;
    cert.sets.assign(sets.begin(), sets.begin() + static_cast<std::ptrdiff_t>(best.score));
    out.certificates.push_back(std::move(cert));
    out.levels.push_back(best.members);
    for (Label x : best.members) rest.erase(std::find(rest.begin(), rest.end(), x));
    out.windows.push_back(best.score);
  }
  out.levels.push_back(rest);
  out.graph = detail::layered_graph(n, out.levels);
  return out;
}

struct CertificateVerdict {
  bool pass = true;
  std::size_t level = 0;
  Slot slot = 0;
  std::string reason;
  explicit operator bool() const { return pass; }
};

// Re-simulates the protocol on the committed graph.
inline CertificateVerdict validate_certificate(const LayeredAdversarialGraph& g, const ProtocolSchedule& protocol) {
  Slot horizon = g.certified_total() + 1;
  for (const auto& c : g.certificates) horizon = std::max<Slot>(horizon, c.start + c.window);
  RunOptions opts;
  opts.max_slots = horizon;
  opts.stop_on_termination = false;
  opts.stop_on_quiescence = false;
  auto tr = run(BroadcastInstance::single(g.graph, g.source), protocol, opts);

  std::size_t need = 0;
  for (std::size_t j = 1; j < g.levels.size(); ++j) {
    need += g.windows.at(j);
    auto a = detail::level_arrival(tr, g.levels[j]);
    if (a && *a < need)
      return {false, j, *a, "level reached before its certified delay " + std::to_string(need)};
  }
  for (const auto& c : g.certificates) {
    LabelSet members(g.n);
    for (Label x : c.subset) members.insert(x);
    if (c.sets.size() != c.window) return {false, c.level, c.start, "certificate window and set count differ"};
    for (std::size_t w = 0; w < c.window; ++w) {
      const Slot t = c.start + w;
      if (intersection_size(c.sets[w], members, 1) == 1) return {false, c.level, t, "recorded set selects the level"};
      LabelSet actual(g.n);
      for (Label x : tr.transmitters(t))
        if (members.contains(x)) actual.insert(x);
      LabelSet recorded(g.n);
      for (Label x : c.sets[w].labels())
        if (members.contains(x)) recorded.insert(x);
      if (actual != recorded) return {false, c.level, t, "recorded transmitters differ from simulation"};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------

namespace io {

using radiobcast::io::FormatError;

inline void write_graph(std::ostream& out, const LayeredAdversarialGraph& g) {
  out << "ADVGRAPH v1 n=" << g.n << " D=" << g.depth << " variant=" << to_string(g.variant) << " delta=" << g.delta
      << " source=" << g.source << " partial=" << (g.partial ? 1 : 0) << '\n';
  for (const auto& d : g.diagnostics) out << "NOTE " << d << '\n';
  for (std::size_t j = 0; j < g.levels.size(); ++j) {
    out << "LEVEL " << j << " T=" << g.windows.at(j);
    for (Label v : g.levels[j]) out << ' ' << v;
    out << '\n';
  }
  auto edges = g.graph.edges();
  out << "EDGES " << edges.size() << '\n';
  for (auto [u, v] : edges) out << u << ' ' << v << '\n';
  for (const auto& c : g.certificates) {
    out << "CERT level=" << c.level << " start=" << c.start << " window=" << c.window << " subset=";
    for (std::size_t i = 0; i < c.subset.size(); ++i) out << (i ? "," : "") << c.subset[i];
    out << " sets=" << c.sets.size() << '\n';
    setfam::SetFamily f{g.n, c.sets, {}};
    radiobcast::io::write_family(out, f);
  }
  out << "END\n";
}

inline std::vector<Label> parse_labels(std::istringstream& in, std::size_t n) {
  std::vector<Label> out;
  std::string tok;
  while (in >> tok) {
    auto v = radiobcast::io::to_size(tok);
    if (v == 0 || v > n) throw FormatError("label " + tok + " outside [1," + std::to_string(n) + "]");
    out.push_back(static_cast<Label>(v));
  }
  return out;
}

inline LayeredAdversarialGraph read_graph(std::istream& in) {
  using radiobcast::io::field;
  using radiobcast::io::parse_header;
  using radiobcast::io::to_size;
  const std::string tag = "ADVGRAPH v1";
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty adversarial graph stream");
  if (line.rfind(tag, 0) != 0) throw FormatError("expected '" + tag + "' header");
  auto kv = parse_header("ADVGRAPH" + line.substr(tag.size()), "ADVGRAPH");
  LayeredAdversarialGraph g;
  g.n = to_size(field(kv, "n"));
  g.depth = to_size(field(kv, "D"));
  const auto& var = field(kv, "variant");
  if (var == "general") g.variant = Variant::general;
  else if (var == "degree") g.variant = Variant::degree;
  else throw FormatError("unknown variant '" + var + "'");
  g.delta = to_size(field(kv, "delta"));
  g.source = static_cast<Label>(to_size(field(kv, "source")));
  g.partial = to_size(field(kv, "partial")) != 0;
  g.graph = RadioGraph(g.n);

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "END") {
      if (g.levels.size() != g.depth + 1) throw FormatError("expected " + std::to_string(g.depth + 1) + " levels");
      return g;
    }
    if (key == "NOTE") {
      g.diagnostics.push_back(line.size() > 5 ? line.substr(5) : std::string());
    } else if (key == "LEVEL") {
      std::string j, t;
      ls >> j >> t;
      if (to_size(j) != g.levels.size() || t.rfind("T=", 0) != 0) throw FormatError("malformed LEVEL line: " + line);
      g.windows.push_back(to_size(t.substr(2)));
      g.levels.push_back(parse_labels(ls, g.n));
    } else if (key == "EDGES") {
      std::string c;
      ls >> c;
      std::size_t count = to_size(c);
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw FormatError("truncated edge list");
        std::istringstream es(line);
        auto e = parse_labels(es, g.n);
        if (e.size() != 2) throw FormatError("malformed edge line: " + line);
        try {
          g.graph.add_edge(e[0], e[1]);
        } catch (const std::invalid_argument& err) {
          throw FormatError(err.what());
        }
      }
    } else if (key == "CERT") {
      auto ckv = parse_header(line, "CERT");
      LevelCertificate c;
      c.level = to_size(field(ckv, "level"));
      c.start = to_size(field(ckv, "start"));
      c.window = to_size(field(ckv, "window"));
      std::string sub = field(ckv, "subset");
      std::replace(sub.begin(), sub.end(), ',', ' ');
      std::istringstream ss(sub);
      c.subset = parse_labels(ss, g.n);
      auto fam = radiobcast::io::read_family(in, to_size(field(ckv, "sets")));
      if (fam.ground_size != g.n) throw FormatError("certificate sets over the wrong ground set");
      c.sets = std::move(fam.sets);
      g.certificates.push_back(std::move(c));
    } else if (!key.empty()) {
      throw FormatError("unexpected line: " + line);
    }
  }
  throw FormatError("missing END");
}

inline std::string to_text(const LayeredAdversarialGraph& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

}  // namespace io

// ---------------------------------------------------------------------------

struct GuvInstance {
  Label u = 0, v = 0;
  BroadcastInstance instance;
};

// Source 1 feeds 2..n-1; the sink n hears exactly u and v. One instance per
// pair u < v, in lexicographic order.
inline std::vector<GuvInstance> build_guv_family(std::size_t n, std::size_t r, ChannelMode mode = ChannelMode::bb) {
  if (n < 4) throw std::invalid_argument("G_{u,v} needs n >= 4");
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  std::vector<GuvInstance> out;
  for (Label u = 2; u + 1 < n; ++u)
    for (Label v = u + 1; v < n; ++v) {
      RadioGraph g(n);
      for (Label x = 2; x < n; ++x) g.add_edge(1, x);
      g.add_edge(u, static_cast<Label>(n));
      g.add_edge(v, static_cast<Label>(n));
      out.push_back({u, v, {std::move(g), {{1, static_cast<std::uint32_t>(r)}}, mode}});
    }
  return out;
}

inline std::vector<Label> guv_second_level(std::size_t n) {
  std::vector<Label> s;
  for (Label x = 2; x < n; ++x) s.push_back(x);
  return s;
}

struct TreeInstance {
  BroadcastInstance instance;
  Label root = 1;
  std::vector<Label> leaves;
  std::vector<Label> second_level;
  Label sink = 0;
};

// Binary in-tree in heap numbering: root 1, node i feeds i/2, leaves r..2r-1
// each hold one message. The root feeds the second level 2r..2r+s-1, whose
// first two nodes feed the sink 2r+s.
inline TreeInstance build_tree_multisource(std::size_t r, std::size_t extra_second_level,
                                           ChannelMode mode = ChannelMode::bb) {
  if (r < 2 || (r & (r - 1)) != 0)
    throw std::invalid_argument("r = " + std::to_string(r) + " is not a power of two >= 2; pad with silent leaves to " +
                                std::to_string(std::size_t{1} << setfam::ceil_log2(std::max<std::size_t>(r, 2))));
  if (extra_second_level < 2) throw std::invalid_argument("second level needs at least two nodes");
  const std::size_t s = extra_second_level;
  const std::size_t n = 2 * r + s;
  TreeInstance t;
  RadioGraph g(n);
  for (std::size_t i = 2; i < 2 * r; ++i) g.add_edge(static_cast<Label>(i), static_cast<Label>(i / 2));
  for (std::size_t x = 2 * r; x < 2 * r + s; ++x) {
    g.add_edge(1, static_cast<Label>(x));
    t.second_level.push_back(static_cast<Label>(x));
  }
  t.sink = static_cast<Label>(n);
  g.add_edge(t.second_level[0], t.sink);
  g.add_edge(t.second_level[1], t.sink);
  std::vector<SourceSpec> sources;
  for (std::size_t i = r; i < 2 * r; ++i) {
    t.leaves.push_back(static_cast<Label>(i));
    sources.push_back({static_cast<Label>(i), 1});
  }
  t.instance = {std::move(g), std::move(sources), mode};
  return t;
}

// One row per listed node over slots 0..T-1: z when the node sent exactly one
// message and it is the z-th in priority order, 0 otherwise.
inline setfam::SequenceSet extract_sequences(const SimTrace& tr, const std::vector<Label>& nodes, std::size_t r,
                                             std::optional<Slot> T = std::nullopt) {
  const Slot len = T.value_or(tr.slots.size());
  if (!tr.full || len > tr.slots.size()) throw std::out_of_range("trace does not cover the requested slots");
  std::vector<std::vector<setfam::SequenceSet::Symbol>> rows;
  for (Label v : nodes) {
    if (v == 0 || v > tr.n) throw std::out_of_range("label " + std::to_string(v) + " outside the trace");
    std::vector<setfam::SequenceSet::Symbol> row(len, 0);
    for (Slot t = 0; t < len; ++t)
      for (const auto& tx : tr.slots[t].transmissions)
        if (tx.sender == v && tx.payload.size() == 1) {
          std::size_t z = tr.message_index(tx.payload[0]) + 1;
          if (z <= r) row[t] = static_cast<setfam::SequenceSet::Symbol>(z);
        }
    rows.push_back(std::move(row));
  }
  return setfam::SequenceSet(r, std::move(rows));
}

}  // namespace radiobcast::adversary
