#pragma once

// Generalized workflow nets: structure, soundness and state machine
// decomposability.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfnet/petri_net.hpp"
#include "wfnet/reachability.hpp"

namespace wfnet {

class GwfNet;
GwfNet check_gwf(PetriNet net, Marking final);

/// A marked net with a designated final marking that passed check_gwf.
class GwfNet {
 public:
  const PetriNet& net() const { return net_; }
  const Marking& final_marking() const { return final_; }

  friend bool operator==(const GwfNet&, const GwfNet&) = default;

 private:
  friend GwfNet check_gwf(PetriNet, Marking);
  GwfNet(PetriNet net, Marking final) : net_(std::move(net)), final_(std::move(final)) {}

  PetriNet net_;
  Marking final_;
};

/// All violated clauses of the GWF-net definition (empty when valid).
/// gwf.1: m0 nonempty, set-valued, no input arcs; gwf.2: m_f nonempty,
/// set-valued, no output arcs; gwf.3: every node lies on an m0 -> m_f path.
inline std::vector<Violation> gwf_violations(const PetriNet& net, const Marking& final) {
  std::vector<Violation> out;
  const Marking& m0 = net.initial();
  if (final.size() != net.place_count()) {
    out.push_back({"gwf.2", {}, "final marking does not belong to this net"});
    return out;
  }

  if (m0.empty()) out.push_back({"gwf.1", {}, "initial marking is empty"});
  if (!m0.is_set()) out.push_back({"gwf.1", net.names_of(m0), "initial marking is not a set"});
  {
    std::vector<std::string> bad;
    for (Index p : m0.support())
      if (!net.place_preset(p).empty()) bad.push_back(net.place_name(p));
    if (!bad.empty()) out.push_back({"gwf.1", bad, "initial places with input arcs"});
  }

  if (final.empty()) out.push_back({"gwf.2", {}, "final marking is empty"});
  if (!final.is_set()) out.push_back({"gwf.2", net.names_of(final), "final marking is not a set"});
  {
    std::vector<std::string> bad;
    for (Index p : final.support())
      if (!net.place_postset(p).empty()) bad.push_back(net.place_name(p));
    if (!bad.empty()) out.push_back({"gwf.2", bad, "final places with output arcs"});
  }

  NodeSet from_initial(net), to_final(net);
  std::vector<NodeRef> stack;
  for (Index p : m0.support()) {
    from_initial.insert(NodeRef::place(p));
    stack.push_back(NodeRef::place(p));
  }
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    for (auto y : net.postset(n))
      if (!from_initial.contains(y)) {
        from_initial.insert(y);
        stack.push_back(y);
      }
  }
  for (Index p : final.support()) {
    to_final.insert(NodeRef::place(p));
    stack.push_back(NodeRef::place(p));
  }
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    for (auto y : net.preset(n))
      if (!to_final.contains(y)) {
        to_final.insert(y);
        stack.push_back(y);
      }
  }
  std::vector<std::string> off_path;
  for (auto n : net.nodes())
    if (!from_initial.contains(n) || !to_final.contains(n)) off_path.push_back(net.name_of(n));
  if (!off_path.empty()) out.push_back({"gwf.3", off_path, "nodes not on a path from m0 to m_f"});
  return out;
}

inline GwfNet check_gwf(PetriNet net, Marking final) {
  auto v = gwf_violations(net, final);
  if (!v.empty()) throw StructuralViolation(std::move(v));
  return GwfNet(std::move(net), std::move(final));
}

inline GwfNet check_gwf(PetriNet net, const std::set<std::string>& final) {
  Marking m = net.marking_of(final);
  return check_gwf(std::move(net), std::move(m));
}

// ---------------------------------------------------------------------------
// Soundness

struct Witness {
  std::vector<std::string> firing;  // from the initial marking
  Marking marking;                  // reached by `firing`
  std::optional<Marking> covered;   // for unbounded witnesses: earlier marking strictly covered
};

struct SoundnessReport {
  bool sound = false;
  std::optional<int> violated_clause;
  std::optional<Witness> witness;
  std::vector<std::string> dead_transitions;  // clause 3
  std::size_t states = 0;
  std::string summary;
};

namespace detail {

/// Vertices from which some final-marking vertex is reachable in the graph.
inline std::vector<bool> coreachable(const ReachabilityGraph& rg, const std::vector<std::size_t>& targets) {
  std::vector<std::vector<std::size_t>> in(rg.vertices.size());
  for (const auto& e : rg.edges) in[e.to].push_back(e.from);
  std::vector<bool> mark(rg.vertices.size(), false);
  std::vector<std::size_t> stack;
  for (auto t : targets) {
    mark[t] = true;
    stack.push_back(t);
  }
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto u : in[v])
      if (!mark[u]) {
        mark[u] = true;
        stack.push_back(u);
      }
  }
  return mark;
}

inline Witness witness_for(const PetriNet& net, const ReachabilityGraph& rg, std::size_t v) {
  return {rg.path_names(net, v), rg.vertices[v], std::nullopt};
}

}  // namespace detail

/// Decides soundness on the explicit state space.
///
/// Clause 1 (proper termination) uses one backward pass from the m_f vertex;
/// clause 2 (clean termination) looks for a reachable strict superset of m_f;
/// clause 3 requires every transition to label some edge. An unbounded
/// witness is reported under clause 1. A truncated exploration still yields
/// a verdict when it already contains a dead non-final marking or a clause-2
/// violation; otherwise IncompleteExploration is thrown.
inline SoundnessReport check_soundness(const GwfNet& g, ExploreBounds bounds = {}) {
  const PetriNet& net = g.net();
  const Marking& mf = g.final_marking();
  auto rg = explore(net, bounds);
  SoundnessReport r;
  r.states = rg.vertices.size();

  if (rg.unbounded_witness) {
    auto [a, b] = *rg.unbounded_witness;
    r.violated_clause = 1;
    r.witness = detail::witness_for(net, rg, b);
    r.witness->covered = rg.vertices[a];
    r.summary = "unbounded: " + net.format(rg.vertices[b]) + " strictly covers " + net.format(rg.vertices[a]);
    return r;
  }

  auto dead_non_final = [&]() -> std::optional<std::size_t> {
    for (std::size_t v = 0; v < rg.vertices.size(); ++v)
      if (rg.expanded[v] && rg.out_edges[v].empty() && rg.vertices[v] != mf) return v;
    return std::nullopt;
  };
  auto over_final = [&]() -> std::optional<std::size_t> {
    for (std::size_t v = 0; v < rg.vertices.size(); ++v)
      if (rg.vertices[v].strictly_covers(mf)) return v;
    return std::nullopt;
  };

  if (rg.truncated) {
    if (auto v = dead_non_final()) {
      r.violated_clause = 1;
      r.witness = detail::witness_for(net, rg, *v);
      r.summary = "dead marking " + net.format(rg.vertices[*v]) + " (exploration truncated)";
      return r;
    }
    if (auto v = over_final()) {
      r.violated_clause = 2;
      r.witness = detail::witness_for(net, rg, *v);
      r.summary = "marking " + net.format(rg.vertices[*v]) + " strictly covers the final marking (exploration truncated)";
      return r;
    }
    throw IncompleteExploration("exploration truncated after " + std::to_string(rg.vertices.size()) +
                                " markings without a verdict");
  }

  std::vector<std::size_t> targets;
  if (auto f = rg.find(mf)) targets.push_back(*f);
  auto co = detail::coreachable(rg, targets);
  std::optional<std::size_t> stuck;
  for (std::size_t v = 0; v < rg.vertices.size() && !stuck; ++v)
    if (!co[v] && rg.out_edges[v].empty()) stuck = v;
  for (std::size_t v = 0; v < rg.vertices.size() && !stuck; ++v)
    if (!co[v]) stuck = v;
  if (stuck) {
    r.violated_clause = 1;
    r.witness = detail::witness_for(net, rg, *stuck);
    r.summary = "final marking unreachable from " + net.format(rg.vertices[*stuck]);
    return r;
  }
  if (auto v = over_final()) {
    r.violated_clause = 2;
    r.witness = detail::witness_for(net, rg, *v);
    r.summary = "marking " + net.format(rg.vertices[*v]) + " strictly covers the final marking";
    return r;
  }
  std::vector<bool> fired(net.transition_count(), false);
  for (const auto& e : rg.edges) fired[e.transition] = true;
  for (Index t = 0; t < net.transition_count(); ++t)
    if (!fired[t]) r.dead_transitions.push_back(net.transition_name(t));
  if (!r.dead_transitions.empty()) {
    r.violated_clause = 3;
    r.summary = "dead transitions:";
    for (const auto& t : r.dead_transitions) r.summary += " " + t;
    return r;
  }
  r.sound = true;
  r.summary = "sound (" + std::to_string(r.states) + " reachable markings)";
  return r;
}

// ---------------------------------------------------------------------------
// Sequential components

/// Places A such that N(A ∪ •A ∪ A•) is a connected state machine carrying
/// exactly one token of m0. `transitions` lists •A ∪ A•.
struct SequentialComponent {
  IndexList places;
  IndexList transitions;

  bool contains_place(Index p) const { return std::binary_search(places.begin(), places.end(), p); }
  bool contains_transition(Index t) const {
    return std::binary_search(transitions.begin(), transitions.end(), t);
  }
  friend bool operator==(const SequentialComponent&, const SequentialComponent&) = default;
};

/// Checks the sequential-component conditions directly.
inline bool is_sequential_component(const PetriNet& net, const IndexList& places) {
  if (places.empty()) return false;
  std::vector<bool> in(net.place_count(), false);
  std::uint64_t tokens = 0;
  for (Index p : places) {
    in[p] = true;
    tokens += net.initial()[p];
  }
  if (tokens != 1) return false;
  std::set<Index> adjacent;
  for (Index p : places) {
    for (Index t : net.place_preset(p)) adjacent.insert(t);
    for (Index t : net.place_postset(p)) adjacent.insert(t);
  }
  for (Index t : adjacent) {
    int ins = 0, outs = 0;
    for (Index p : net.transition_preset(t)) ins += in[p];
    for (Index p : net.transition_postset(t)) outs += in[p];
    if (ins != 1 || outs != 1) return false;
  }
  // Connectivity through adjacent transitions.
  std::vector<bool> seen(net.place_count(), false);
  std::vector<Index> stack{places.front()};
  seen[places.front()] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    Index p = stack.back();
    stack.pop_back();
    auto visit = [&](std::span<const Index> ts, bool forward) {
      for (Index t : ts)
        for (Index q : forward ? net.transition_postset(t) : net.transition_preset(t))
          if (in[q] && !seen[q]) {
            seen[q] = true;
            ++count;
            stack.push_back(q);
          }
    };
    visit(net.place_postset(p), true);
    visit(net.place_preset(p), false);
  }
  return count == places.size();
}

namespace detail {

class ComponentSearch {
 public:
  ComponentSearch(const PetriNet& net, const IndexList& required_transitions)
      : net_(net),
        in_(net.place_count(), false),
        excluded_(net.place_count(), 0),
        ins_(net.transition_count(), 0),
        outs_(net.transition_count(), 0),
        required_(net.transition_count(), false) {
    for (Index t : required_transitions) required_[t] = true;
  }

  std::optional<SequentialComponent> run(const IndexList& required_places) {
    for (Index p : required_places)
      if (!in_[p]) add(p);
    if (search()) {
      SequentialComponent c;
      for (Index p = 0; p < net_.place_count(); ++p)
        if (in_[p]) c.places.push_back(p);
      for (Index t = 0; t < net_.transition_count(); ++t)
        if (ins_[t] + outs_[t] > 0) c.transitions.push_back(t);
      return c;
    }
    return std::nullopt;
  }

 private:
  void add(Index p) {
    in_[p] = true;
    tokens_ += net_.initial()[p];
    members_.push_back(p);
    for (Index t : net_.place_postset(p)) ++ins_[t];
    for (Index t : net_.place_preset(p)) ++outs_[t];
  }
  void remove(Index p) {
    in_[p] = false;
    tokens_ -= net_.initial()[p];
    members_.pop_back();
    for (Index t : net_.place_postset(p)) --ins_[t];
    for (Index t : net_.place_preset(p)) --outs_[t];
  }

  bool violated() const {
    if (tokens_ > 1) return true;
    for (Index p : members_) {
      for (Index t : net_.place_postset(p))
        if (ins_[t] > 1) return true;
      for (Index t : net_.place_preset(p))
        if (outs_[t] > 1) return true;
    }
    return false;
  }

  bool search() {
    if (violated()) return false;
    // First transition adjacent to A (or required) missing an input or output.
    for (Index t = 0; t < net_.transition_count(); ++t) {
      bool active = required_[t] || ins_[t] + outs_[t] > 0;
      if (!active || (ins_[t] == 1 && outs_[t] == 1)) continue;
      auto candidates = ins_[t] == 0 ? net_.transition_preset(t) : net_.transition_postset(t);
      std::vector<Index> tried;
      bool found = false;
      for (Index p : candidates) {
        if (in_[p] || excluded_[p]) continue;
        add(p);
        found = search();
        if (found) break;
        remove(p);
        ++excluded_[p];
        tried.push_back(p);
      }
      for (Index p : tried) --excluded_[p];
      return found;
    }
    if (tokens_ != 1) return false;
    IndexList places(members_.begin(), members_.end());
    std::sort(places.begin(), places.end());
    return is_sequential_component(net_, places);
  }

  const PetriNet& net_;
  std::vector<bool> in_;
  std::vector<int> excluded_;
  std::vector<int> ins_, outs_;
  std::vector<bool> required_;
  std::vector<Index> members_;
  std::uint64_t tokens_ = 0;
};

}  // namespace detail

/// Exact search for a sequential component containing all `places` and with
/// all `transitions` in its neighbourhood. Depth-first over place sets grown
/// through unsatisfied transitions; exponential in the worst case.
inline std::optional<SequentialComponent> find_sequential_component(const PetriNet& net,
                                                                    const IndexList& places,
                                                                    const IndexList& transitions = {}) {
  detail::ComponentSearch s(net, transitions);
  return s.run(places);
}

/// A set of sequential components covering every place, or nullopt if some
/// place lies in no sequential component.
inline std::optional<std::vector<SequentialComponent>> find_sequential_cover(const PetriNet& net) {
  std::vector<SequentialComponent> cover;
  std::vector<bool> covered(net.place_count(), false);
  for (Index p = 0; p < net.place_count(); ++p) {
    if (covered[p]) continue;
    auto c = find_sequential_component(net, {p});
    if (!c) return std::nullopt;
    for (Index q : c->places) covered[q] = true;
    cover.push_back(std::move(*c));
  }
  return cover;
}

inline bool is_smd(const PetriNet& net) { return find_sequential_cover(net).has_value(); }

}  // namespace wfnet
