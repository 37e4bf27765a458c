#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wfnet/petri_net.hpp"

namespace wfnet {

struct ExploreBounds {
  std::uint32_t cap = 8;       // tokens per place
  std::size_t limit = 200000;  // vertices
};

struct ReachabilityEdge {
  std::size_t from;
  Index transition;
  std::size_t to;
};

/// Explicit reachability graph rooted at the initial marking (vertex 0).
///
/// Vertices are numbered in breadth-first discovery order and successors are
/// generated in transition-index order, so equal inputs yield equal graphs.
struct ReachabilityGraph {
  std::vector<Marking> vertices;
  std::vector<ReachabilityEdge> edges;
  std::vector<std::vector<std::size_t>> out_edges;  // edge ids per vertex
  std::vector<std::optional<std::size_t>> parent;   // BFS tree edge per vertex
  std::vector<bool> expanded;                       // all successors recorded
  bool truncated = false;
  /// (m, m') with m' reachable from m and m' strictly covering m.
  std::optional<std::pair<std::size_t, std::size_t>> unbounded_witness;

  std::size_t root() const { return 0; }
  bool complete() const { return !truncated && !unbounded_witness; }

  std::optional<std::size_t> find(const Marking& m) const {
    auto it = index_.find(m);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Transition indices along the BFS tree from the root to v.
  IndexList path_to(std::size_t v) const {
    IndexList path;
    while (parent[v]) {
      const auto& e = edges[*parent[v]];
      path.push_back(e.transition);
      v = e.from;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::vector<std::string> path_names(const PetriNet& net, std::size_t v) const {
    std::vector<std::string> out;
    for (Index t : path_to(v)) out.push_back(net.transition_name(t));
    return out;
  }

  std::size_t add_vertex(Marking m, std::optional<std::size_t> via) {
    std::size_t id = vertices.size();
    index_.emplace(m, id);
    vertices.push_back(std::move(m));
    out_edges.emplace_back();
    parent.push_back(via);
    expanded.push_back(false);
    return id;
  }

  std::size_t add_edge(std::size_t from, Index t, std::size_t to) {
    edges.push_back({from, t, to});
    out_edges[from].push_back(edges.size() - 1);
    return edges.size() - 1;
  }

 private:
  std::unordered_map<Marking, std::size_t, MarkingHash> index_;
};

/// Breadth-first closure of the initial marking under the firing rule.
///
/// A freshly discovered marking that strictly covers one of its ancestors on
/// the BFS tree path ends the search with an unbounded witness. Markings
/// exceeding `cap` in some place are dropped, as is everything beyond `limit`
/// vertices; either sets `truncated`.
inline ReachabilityGraph explore(const PetriNet& net, ExploreBounds bounds = {}) {
  ReachabilityGraph g;
  g.add_vertex(net.initial(), std::nullopt);
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    bool all_recorded = true;
    for (Index t = 0; t < net.transition_count(); ++t) {
      if (!enabled(net, g.vertices[v], t)) continue;
      Marking next = fire(net, g.vertices[v], t);
      if (auto known = g.find(next)) {
        g.add_edge(v, t, *known);
        continue;
      }
      bool over_cap = false;
      for (auto c : next.counts())
        if (c > bounds.cap) over_cap = true;
      // Cover check along the tree path v, parent(v), ..., root.
      std::optional<std::size_t> covered;
      for (std::optional<std::size_t> a = v; a; a = g.parent[*a] ? std::optional(g.edges[*g.parent[*a]].from) : std::nullopt) {
        if (next.strictly_covers(g.vertices[*a])) {
          covered = *a;
          break;
        }
      }
      if (covered) {
        std::size_t w = g.add_vertex(std::move(next), g.edges.size());
        g.add_edge(v, t, w);
        g.unbounded_witness = std::make_pair(*covered, w);
        return g;
      }
      if (over_cap || g.vertices.size() >= bounds.limit) {
        g.truncated = true;
        all_recorded = false;
        continue;
      }
      std::size_t w = g.add_vertex(std::move(next), g.edges.size());
      g.add_edge(v, t, w);
      queue.push_back(w);
    }
    g.expanded[v] = all_recorded;
  }
  return g;
}

/// Every reachable marking has at most one token per place.
inline bool is_safe(const ReachabilityGraph& rg) {
  if (!rg.complete())
    throw IncompleteExploration("safety requires a complete reachability graph");
  for (const auto& m : rg.vertices)
    if (!m.is_set()) return false;
  return true;
}

/// Graphviz rendering of a reachability graph.
inline std::string to_dot(const PetriNet& net, const ReachabilityGraph& rg) {
  std::string s = "digraph reachability {\n";
  for (std::size_t v = 0; v < rg.vertices.size(); ++v) {
    s += "  v" + std::to_string(v) + " [label=\"" + net.format(rg.vertices[v]) + "\"";
    if (v == rg.root()) s += ", shape=doublecircle";
    s += "];\n";
  }
  for (const auto& e : rg.edges)
    s += "  v" + std::to_string(e.from) + " -> v" + std::to_string(e.to) + " [label=\"" +
         net.transition_name(e.transition) + "\"];\n";
  return s + "}\n";
}

}  // namespace wfnet
