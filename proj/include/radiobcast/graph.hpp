#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "radiobcast/errors.hpp"
#include "radiobcast/label_set.hpp"

namespace radiobcast {

// Directed graph on labels 1..n. Symmetric links are two antiparallel edges.
class RadioGraph {
 public:
  RadioGraph() = default;
  explicit RadioGraph(std::size_t n) : out_(n + 1), in_(n + 1) {}

  RadioGraph(std::size_t n, const std::vector<std::pair<Label, Label>>& edges) : RadioGraph(n) {
    for (auto [u, v] : edges) add_edge(u, v);
  }

  std::size_t size() const { return out_.empty() ? 0 : out_.size() - 1; }

  void add_edge(Label u, Label v) {
    check(u);
    check(v);
    if (u == v) throw std::invalid_argument("self-loop at " + std::to_string(u));
    auto& o = out_[u];
    auto pos = std::lower_bound(o.begin(), o.end(), v);
    if (pos != o.end() && *pos == v)
      throw std::invalid_argument("parallel edge " + std::to_string(u) + "->" + std::to_string(v));
    o.insert(pos, v);
    auto& i = in_[v];
    i.insert(std::lower_bound(i.begin(), i.end(), u), u);
    ++edges_;
  }

  bool has_edge(Label u, Label v) const {
    if (u == 0 || u > size()) return false;
    return std::binary_search(out_[u].begin(), out_[u].end(), v);
  }

  const std::vector<Label>& out(Label u) const { return out_.at(u); }
  const std::vector<Label>& in(Label v) const { return in_.at(v); }
  std::size_t edge_count() const { return edges_; }

  std::size_t max_in_degree() const {
    std::size_t d = 0;
    for (std::size_t v = 1; v <= size(); ++v) d = std::max(d, in_[v].size());
    return d;
  }

  // Sorted by (u, v).
  std::vector<std::pair<Label, Label>> edges() const {
    std::vector<std::pair<Label, Label>> e;
    for (std::size_t u = 1; u <= size(); ++u)
      for (Label v : out_[u]) e.emplace_back(static_cast<Label>(u), v);
    return e;
  }

  // Hop distances from s; nullopt for unreachable labels. Index 0 unused.
  std::vector<std::optional<std::size_t>> distances_from(Label s) const {
    check(s);
    std::vector<std::optional<std::size_t>> d(size() + 1);
    std::deque<Label> q{s};
    d[s] = 0;
    while (!q.empty()) {
      Label u = q.front();
      q.pop_front();
      for (Label v : out_[u])
        if (!d[v]) {
          d[v] = *d[u] + 1;
          q.push_back(v);
        }
    }
    return d;
  }

  bool all_reachable_from(Label s) const {
    auto d = distances_from(s);
    for (std::size_t v = 1; v <= size(); ++v)
      if (!d[v]) return false;
    return true;
  }

  friend bool operator==(const RadioGraph& a, const RadioGraph& b) { return a.out_ == b.out_; }

 private:
  void check(Label v) const {
    if (v == 0 || v > size()) throw std::invalid_argument("label " + std::to_string(v) + " outside [1," + std::to_string(size()) + "]");
  }

  std::vector<std::vector<Label>> out_, in_;
  std::size_t edges_ = 0;
};

namespace graphs {

// 1 -> 2 -> ... -> n
inline RadioGraph path(std::size_t n) {
  RadioGraph g(n);
  for (std::size_t v = 1; v < n; ++v) g.add_edge(static_cast<Label>(v), static_cast<Label>(v + 1));
  return g;
}

// 1 -> {2, ..., n}
inline RadioGraph star(std::size_t n) {
  RadioGraph g(n);
  for (std::size_t v = 2; v <= n; ++v) g.add_edge(1, static_cast<Label>(v));
  return g;
}

struct Layering {
  RadioGraph graph;
  std::vector<std::vector<Label>> levels;
};

// Consecutive labels fill the levels in order (level 0 gets label 1 when
// sizes[0] == 1). With max_in_degree == 0 consecutive levels are joined by
// full bipartite edges; otherwise each node draws between 1 and
// max_in_degree distinct in-neighbours from the previous level.
inline Layering layered(const std::vector<std::size_t>& sizes, std::size_t max_in_degree = 0, std::uint64_t seed = 0) {
  std::size_t n = 0;
  for (auto s : sizes) {
    if (s == 0) throw std::invalid_argument("empty level");
    n += s;
  }
  Layering out{RadioGraph(n), {}};
  Label next = 1;
  for (auto s : sizes) {
    std::vector<Label> lvl;
    for (std::size_t i = 0; i < s; ++i) lvl.push_back(next++);
    out.levels.push_back(std::move(lvl));
  }
  rng::Engine g(seed);
  for (std::size_t j = 1; j < out.levels.size(); ++j) {
    auto prev = out.levels[j - 1];
    for (Label v : out.levels[j]) {
      if (max_in_degree == 0) {
        for (Label u : prev) out.graph.add_edge(u, v);
        continue;
      }
      std::size_t cap = std::min(max_in_degree, prev.size());
      std::size_t d = 1 + static_cast<std::size_t>(rng::below(g, cap));
      for (std::size_t i = 0; i < d; ++i) std::swap(prev[i], prev[i + rng::below(g, prev.size() - i)]);
      for (std::size_t i = 0; i < d; ++i) out.graph.add_edge(prev[i], v);
    }
  }
  return out;
}

// Level sizes for n nodes and eccentricity d from label 1: one source, the
// remaining n-1 nodes spread as evenly as possible over d levels.
inline std::vector<std::size_t> even_levels(std::size_t n, std::size_t d) {
  if (d == 0 || n < d + 1) throw std::invalid_argument("need n >= d + 1 and d >= 1");
  std::vector<std::size_t> sizes{1};
  std::size_t rest = n - 1;
  for (std::size_t j = 0; j < d; ++j) sizes.push_back(rest / d + (j < rest % d ? 1 : 0));
  return sizes;
}

// Random digraph with every label reachable from `source` and in-degree at
// most max_in_degree. Labels are visited in a random order starting at the
// source; each takes one in-neighbour among the labels visited before it
// (reachability) and then draws up to max_in_degree-1 further in-neighbours
// from all other labels, rejecting duplicates.
inline RadioGraph random_indegree(std::size_t n, std::size_t max_in_degree, std::uint64_t seed, Label source = 1) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (max_in_degree == 0 && n > 1) throw std::invalid_argument("max in-degree must be positive");
  rng::Engine g(seed);
  std::vector<Label> order;
  for (std::size_t v = 1; v <= n; ++v)
    if (v != source) order.push_back(static_cast<Label>(v));
  for (std::size_t i = 0; i + 1 < order.size(); ++i) std::swap(order[i], order[i + rng::below(g, order.size() - i)]);
  order.insert(order.begin(), source);
  RadioGraph gr(n);
  for (std::size_t i = 1; i < order.size(); ++i) {
    Label v = order[i];
    gr.add_edge(order[rng::below(g, i)], v);
    std::size_t want = static_cast<std::size_t>(rng::below(g, max_in_degree));
    for (std::size_t tries = 0; want > 0 && tries < 8 * max_in_degree; ++tries) {
      Label u = static_cast<Label>(1 + rng::below(g, n));
      if (u == v || gr.has_edge(u, v)) continue;
      gr.add_edge(u, v);
      --want;
    }
  }
  return gr;
}

}  // namespace graphs
}  // namespace radiobcast
