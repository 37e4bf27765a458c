#pragma once

// Place/transition nets, markings and the firing rule.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wfnet/errors.hpp"

namespace wfnet {

using Index = std::uint32_t;
using IndexList = std::vector<Index>;

enum class NodeKind : std::uint8_t { place, transition };

/// Handle to a node of a particular net: its kind plus its position in the
/// net's (name-sorted) place or transition table.
struct NodeRef {
  NodeKind kind = NodeKind::place;
  Index index = 0;

  bool is_place() const { return kind == NodeKind::place; }
  bool is_transition() const { return kind == NodeKind::transition; }

  static NodeRef place(Index i) { return {NodeKind::place, i}; }
  static NodeRef transition(Index i) { return {NodeKind::transition, i}; }

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// Multiset over the places of one net, stored densely. Two markings of the
/// same net compare equal iff they assign the same counts.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : counts_(places, 0) {}
  explicit Marking(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}

  std::size_t size() const { return counts_.size(); }
  std::uint32_t operator[](Index p) const { return counts_[p]; }
  void set(Index p, std::uint32_t n) { counts_[p] = n; }
  void add(Index p, std::uint32_t n = 1) { counts_[p] += n; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  bool empty() const {
    return std::all_of(counts_.begin(), counts_.end(), [](auto c) { return c == 0; });
  }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }
  bool is_set() const {
    return std::all_of(counts_.begin(), counts_.end(), [](auto c) { return c <= 1; });
  }
  IndexList support() const {
    IndexList s;
    for (Index p = 0; p < counts_.size(); ++p)
      if (counts_[p] > 0) s.push_back(p);
    return s;
  }
  /// Pointwise this >= other.
  bool covers(const Marking& other) const {
    for (std::size_t p = 0; p < counts_.size(); ++p)
      if (counts_[p] < other.counts_[p]) return false;
    return true;
  }
  bool strictly_covers(const Marking& other) const { return covers(other) && *this != other; }

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;

 private:
  std::vector<std::uint32_t> counts_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto c : m.counts()) h = (h ^ c) * 0x100000001b3ULL;
    return h;
  }
};

inline bool valid_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') return false;
  return true;
}

/// A marked Petri net N = (P, T, F, m0). Immutable after construction.
///
/// Places and transitions are stored sorted by name, so two nets built from
/// the same declarations are identical regardless of declaration order.
/// Strict construction rejects isolated nodes, transitions with an empty
/// preset or postset, and self-loops; relaxed construction (used for
/// occurrence nets and other derived objects) only checks well-formedness.
class PetriNet {
 public:
  enum class Checks { strict, relaxed };

  PetriNet() = default;

  PetriNet(std::string name, std::vector<std::string> places, std::vector<std::string> transitions,
           const std::vector<std::pair<std::string, std::string>>& arcs,
           const std::map<std::string, std::uint32_t>& initial, Checks checks = Checks::strict)
      : name_(std::move(name)), places_(std::move(places)), transitions_(std::move(transitions)) {
    std::vector<Violation> errors;
    std::sort(places_.begin(), places_.end());
    std::sort(transitions_.begin(), transitions_.end());
    for (std::size_t i = 0; i < places_.size(); ++i) {
      if (!valid_token(places_[i])) errors.push_back({"net.name", {places_[i]}, "invalid place name"});
      if (i && places_[i] == places_[i - 1]) errors.push_back({"net.name", {places_[i]}, "duplicate place"});
      index_.emplace(places_[i], NodeRef::place(static_cast<Index>(i)));
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
      if (!valid_token(transitions_[i]))
        errors.push_back({"net.name", {transitions_[i]}, "invalid transition name"});
      if (i && transitions_[i] == transitions_[i - 1])
        errors.push_back({"net.name", {transitions_[i]}, "duplicate transition"});
      auto [it, fresh] = index_.emplace(transitions_[i], NodeRef::transition(static_cast<Index>(i)));
      if (!fresh && it->second.is_place())
        errors.push_back({"net.disjoint", {transitions_[i]}, "name used for a place and a transition"});
    }
    if (!errors.empty()) throw StructuralViolation(std::move(errors));

    place_pre_.assign(places_.size(), {});
    place_post_.assign(places_.size(), {});
    trans_pre_.assign(transitions_.size(), {});
    trans_post_.assign(transitions_.size(), {});
    for (const auto& [src, dst] : arcs) {
      auto s = find(src);
      auto d = find(dst);
      if (!s || !d) {
        errors.push_back({"net.arc", {src, dst}, "arc references an unknown node"});
        continue;
      }
      if (s->kind == d->kind) {
        errors.push_back({"net.arc", {src, dst}, "arc must connect a place and a transition"});
        continue;
      }
      if (s->is_place()) {
        place_post_[s->index].push_back(d->index);
        trans_pre_[d->index].push_back(s->index);
      } else {
        trans_post_[s->index].push_back(d->index);
        place_pre_[d->index].push_back(s->index);
      }
    }
    for (auto* table : {&place_pre_, &place_post_, &trans_pre_, &trans_post_})
      for (auto& list : *table) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
      }

    initial_ = Marking(places_.size());
    for (const auto& [p, n] : initial) {
      auto r = find(p);
      if (!r || !r->is_place()) {
        errors.push_back({"net.marking", {p}, "initial marking references a non-place"});
        continue;
      }
      initial_.set(r->index, n);
    }

    if (checks == Checks::strict) {
      for (Index t = 0; t < transitions_.size(); ++t) {
        if (trans_pre_[t].empty() && trans_post_[t].empty())
          errors.push_back({"net.isolated", {transitions_[t]}, "isolated node"});
        else if (trans_pre_[t].empty() || trans_post_[t].empty())
          errors.push_back({"net.transition", {transitions_[t]}, "transition needs |pre| >= 1 and |post| >= 1"});
        for (Index p : trans_pre_[t])
          if (std::binary_search(trans_post_[t].begin(), trans_post_[t].end(), p))
            errors.push_back({"net.self-loop", {places_[p], transitions_[t]}, "self-loop"});
      }
      for (Index p = 0; p < places_.size(); ++p)
        if (place_pre_[p].empty() && place_post_[p].empty())
          errors.push_back({"net.isolated", {places_[p]}, "isolated node"});
    }
    if (!errors.empty()) throw StructuralViolation(std::move(errors));
  }

  const std::string& name() const { return name_; }

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  std::size_t node_count() const { return places_.size() + transitions_.size(); }

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<std::string>& transitions() const { return transitions_; }
  const std::string& place_name(Index p) const { return places_[p]; }
  const std::string& transition_name(Index t) const { return transitions_[t]; }
  const std::string& name_of(NodeRef n) const {
    return n.is_place() ? places_[n.index] : transitions_[n.index];
  }

  std::optional<NodeRef> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  NodeRef node(std::string_view name) const {
    auto r = find(name);
    if (!r) throw NodeNotFound(std::string(name));
    return *r;
  }
  Index place(std::string_view name) const {
    auto r = find(name);
    if (!r || !r->is_place()) throw NodeNotFound(std::string(name));
    return r->index;
  }
  Index transition(std::string_view name) const {
    auto r = find(name);
    if (!r || !r->is_transition()) throw NodeNotFound(std::string(name));
    return r->index;
  }

  /// Input transitions of place p.
  std::span<const Index> place_preset(Index p) const { return place_pre_[p]; }
  std::span<const Index> place_postset(Index p) const { return place_post_[p]; }
  /// Input places of transition t.
  std::span<const Index> transition_preset(Index t) const { return trans_pre_[t]; }
  std::span<const Index> transition_postset(Index t) const { return trans_post_[t]; }

  std::vector<NodeRef> preset(NodeRef n) const {
    return lift(n.is_place() ? place_pre_[n.index] : trans_pre_[n.index],
                n.is_place() ? NodeKind::transition : NodeKind::place);
  }
  std::vector<NodeRef> postset(NodeRef n) const {
    return lift(n.is_place() ? place_post_[n.index] : trans_post_[n.index],
                n.is_place() ? NodeKind::transition : NodeKind::place);
  }

  bool has_arc(NodeRef from, NodeRef to) const {
    if (from.kind == to.kind) return false;
    const auto& out = from.is_place() ? place_post_[from.index] : trans_post_[from.index];
    return std::binary_search(out.begin(), out.end(), to.index);
  }

  std::vector<NodeRef> nodes() const {
    std::vector<NodeRef> all;
    all.reserve(node_count());
    for (Index p = 0; p < places_.size(); ++p) all.push_back(NodeRef::place(p));
    for (Index t = 0; t < transitions_.size(); ++t) all.push_back(NodeRef::transition(t));
    return all;
  }

  /// Flow relation as (source, target) name pairs, sorted lexicographically.
  std::vector<std::pair<std::string, std::string>> arcs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (Index p = 0; p < places_.size(); ++p)
      for (Index t : place_post_[p]) out.emplace_back(places_[p], transitions_[t]);
    for (Index t = 0; t < transitions_.size(); ++t)
      for (Index p : trans_post_[t]) out.emplace_back(transitions_[t], places_[p]);
    std::sort(out.begin(), out.end());
    return out;
  }

  const Marking& initial() const { return initial_; }

  Marking empty_marking() const { return Marking(places_.size()); }

  /// Marking holding one token in each named place.
  Marking marking(std::initializer_list<std::string_view> names) const {
    Marking m(places_.size());
    for (auto n : names) m.add(place(n));
    return m;
  }
  template <typename Range>
  Marking marking_of(const Range& names) const {
    Marking m(places_.size());
    for (const auto& n : names) m.add(place(n));
    return m;
  }

  /// "{p:1,q:2}" with places in name order; absent places are omitted.
  std::string format(const Marking& m) const {
    std::string s = "{";
    bool first = true;
    for (Index p = 0; p < m.size(); ++p) {
      if (!m[p]) continue;
      s += (first ? "" : ",") + places_[p] + ":" + std::to_string(m[p]);
      first = false;
    }
    return s + "}";
  }

  std::vector<std::string> names_of(const Marking& m) const {
    std::vector<std::string> out;
    for (Index p : m.support()) out.push_back(places_[p]);
    return out;
  }

  friend bool operator==(const PetriNet& a, const PetriNet& b) {
    return a.name_ == b.name_ && a.places_ == b.places_ && a.transitions_ == b.transitions_ &&
           a.place_post_ == b.place_post_ && a.trans_post_ == b.trans_post_ && a.initial_ == b.initial_;
  }

  /// Same nodes, arcs and initial marking, ignoring the net name.
  bool same_structure(const PetriNet& o) const {
    return places_ == o.places_ && transitions_ == o.transitions_ && place_post_ == o.place_post_ &&
           trans_post_ == o.trans_post_ && initial_ == o.initial_;
  }

 private:
  static std::vector<NodeRef> lift(const IndexList& xs, NodeKind kind) {
    std::vector<NodeRef> out;
    out.reserve(xs.size());
    for (Index i : xs) out.push_back({kind, i});
    return out;
  }

  std::string name_;
  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::unordered_map<std::string, NodeRef> index_;
  std::vector<IndexList> place_pre_, place_post_, trans_pre_, trans_post_;
  Marking initial_;
};

// ---------------------------------------------------------------------------
// Name-level queries

inline std::set<std::string> preset(const PetriNet& net, std::string_view x) {
  std::set<std::string> out;
  for (auto n : net.preset(net.node(x))) out.insert(net.name_of(n));
  return out;
}

inline std::set<std::string> postset(const PetriNet& net, std::string_view x) {
  std::set<std::string> out;
  for (auto n : net.postset(net.node(x))) out.insert(net.name_of(n));
  return out;
}

inline std::set<std::string> preset(const PetriNet& net, const std::set<std::string>& xs) {
  std::set<std::string> out;
  for (const auto& x : xs) out.merge(preset(net, x));
  return out;
}

inline std::set<std::string> postset(const PetriNet& net, const std::set<std::string>& xs) {
  std::set<std::string> out;
  for (const auto& x : xs) out.merge(postset(net, x));
  return out;
}

/// Node-membership vector over a net: places first, then transitions.
class NodeSet {
 public:
  explicit NodeSet(const PetriNet& net)
      : places_(net.place_count(), false), transitions_(net.transition_count(), false) {}

  void insert(NodeRef n) { (n.is_place() ? places_ : transitions_)[n.index] = true; }
  bool contains(NodeRef n) const { return (n.is_place() ? places_ : transitions_)[n.index]; }
  bool contains_place(Index p) const { return places_[p]; }
  bool contains_transition(Index t) const { return transitions_[t]; }

  std::vector<NodeRef> members() const {
    std::vector<NodeRef> out;
    for (Index p = 0; p < places_.size(); ++p)
      if (places_[p]) out.push_back(NodeRef::place(p));
    for (Index t = 0; t < transitions_.size(); ++t)
      if (transitions_[t]) out.push_back(NodeRef::transition(t));
    return out;
  }
  bool any_transition() const {
    return std::find(transitions_.begin(), transitions_.end(), true) != transitions_.end();
  }

 private:
  std::vector<bool> places_;
  std::vector<bool> transitions_;
};

/// Boundary of the subnet N(A): input elements have an arc from outside A or
/// an empty preset; output elements dually.
struct SubnetBoundary {
  std::vector<NodeRef> inputs;
  std::vector<NodeRef> outputs;
};

inline SubnetBoundary subnet_boundary(const PetriNet& net, const NodeSet& a) {
  SubnetBoundary b;
  for (auto x : a.members()) {
    auto pre = net.preset(x);
    auto post = net.postset(x);
    bool in = pre.empty() || std::any_of(pre.begin(), pre.end(), [&](NodeRef z) { return !a.contains(z); });
    bool out = post.empty() || std::any_of(post.begin(), post.end(), [&](NodeRef z) { return !a.contains(z); });
    if (in) b.inputs.push_back(x);
    if (out) b.outputs.push_back(x);
  }
  return b;
}

/// The subnet N(A) = (P ∩ A, T ∩ A, F ∩ (A × A)) with its input and output elements.
struct Subnet {
  std::set<std::string> places;
  std::set<std::string> transitions;
  std::set<std::pair<std::string, std::string>> arcs;
  std::set<std::string> inputs;
  std::set<std::string> outputs;
};

inline Subnet subnet(const PetriNet& net, const std::set<std::string>& a) {
  NodeSet set(net);
  for (const auto& x : a) set.insert(net.node(x));
  Subnet s;
  for (auto x : set.members()) {
    (x.is_place() ? s.places : s.transitions).insert(net.name_of(x));
    for (auto y : net.postset(x))
      if (set.contains(y)) s.arcs.emplace(net.name_of(x), net.name_of(y));
  }
  auto b = subnet_boundary(net, set);
  for (auto x : b.inputs) s.inputs.insert(net.name_of(x));
  for (auto x : b.outputs) s.outputs.insert(net.name_of(x));
  return s;
}

// ---------------------------------------------------------------------------
// Firing rule

inline bool enabled(const PetriNet& net, const Marking& m, Index t) {
  for (Index p : net.transition_preset(t))
    if (m[p] == 0) return false;
  return true;
}

inline bool enabled(const PetriNet& net, const Marking& m, std::string_view t) {
  return enabled(net, m, net.transition(t));
}

/// m' = m - •t + t•.
inline Marking fire(const PetriNet& net, const Marking& m, Index t) {
  if (!enabled(net, m, t)) throw NotEnabled(net.transition_name(t));
  Marking next = m;
  for (Index p : net.transition_preset(t)) next.set(p, next[p] - 1);
  for (Index p : net.transition_postset(t)) next.add(p);
  return next;
}

inline Marking fire(const PetriNet& net, const Marking& m, std::string_view t) {
  return fire(net, m, net.transition(t));
}

/// Fires a sequence of transition names from m; throws NotEnabled on the first
/// transition that cannot fire.
inline Marking replay(const PetriNet& net, Marking m, const std::vector<std::string>& sequence) {
  for (const auto& t : sequence) m = fire(net, m, t);
  return m;
}

// ---------------------------------------------------------------------------
// Causality and conflict

/// Nodes y with (x, y) in F* (forward closure, reflexive).
inline NodeSet forward_closure(const PetriNet& net, NodeRef x) {
  NodeSet seen(net);
  std::vector<NodeRef> stack{x};
  seen.insert(x);
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    for (auto y : net.postset(n))
      if (!seen.contains(y)) {
        seen.insert(y);
        stack.push_back(y);
      }
  }
  return seen;
}

inline NodeSet backward_closure(const PetriNet& net, NodeRef x) {
  NodeSet seen(net);
  std::vector<NodeRef> stack{x};
  seen.insert(x);
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    for (auto y : net.preset(n))
      if (!seen.contains(y)) {
        seen.insert(y);
        stack.push_back(y);
      }
  }
  return seen;
}

inline bool causal(const PetriNet& net, std::string_view x, std::string_view y) {
  auto nx = net.node(x);
  auto ny = net.node(y);
  return forward_closure(net, nx).contains(ny);
}

/// x # y: distinct transitions tx <= x and ty <= y share an input place.
inline bool conflict(const PetriNet& net, NodeRef x, NodeRef y) {
  auto before_x = backward_closure(net, x);
  auto before_y = backward_closure(net, y);
  for (Index tx = 0; tx < net.transition_count(); ++tx) {
    if (!before_x.contains_transition(tx)) continue;
    for (Index ty = 0; ty < net.transition_count(); ++ty) {
      if (tx == ty || !before_y.contains_transition(ty)) continue;
      auto px = net.transition_preset(tx);
      auto py = net.transition_preset(ty);
      for (Index p : px)
        if (std::find(py.begin(), py.end(), p) != py.end()) return true;
    }
  }
  return false;
}

inline bool conflict(const PetriNet& net, std::string_view x, std::string_view y) {
  return conflict(net, net.node(x), net.node(y));
}

inline bool is_acyclic(const PetriNet& net) {
  // Kahn's algorithm over all nodes.
  std::vector<std::size_t> indeg(net.node_count(), 0);
  auto id = [&](NodeRef n) { return n.is_place() ? n.index : net.place_count() + n.index; };
  auto all = net.nodes();
  for (auto n : all) indeg[id(n)] = net.preset(n).size();
  std::vector<NodeRef> ready;
  for (auto n : all)
    if (indeg[id(n)] == 0) ready.push_back(n);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto n = ready.back();
    ready.pop_back();
    ++seen;
    for (auto y : net.postset(n))
      if (--indeg[id(y)] == 0) ready.push_back(y);
  }
  return seen == all.size();
}

inline bool is_p_simple(const PetriNet& net) {
  std::set<std::pair<IndexList, IndexList>> seen;
  for (Index p = 0; p < net.place_count(); ++p) {
    auto pre = net.place_preset(p);
    auto post = net.place_postset(p);
    if (!seen.emplace(IndexList(pre.begin(), pre.end()), IndexList(post.begin(), post.end())).second)
      return false;
  }
  return true;
}

}  // namespace wfnet
