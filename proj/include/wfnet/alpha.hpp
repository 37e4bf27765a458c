#pragma once

// α- and α̂-morphism validation, well-markedness, local nets and the
// unfolding-based local condition, plus behavioural preservation and
// reflection checks.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfnet/labeled.hpp"
#include "wfnet/morphism.hpp"
#include "wfnet/unfolding.hpp"
#include "wfnet/workflow.hpp"

namespace wfnet {

/// Clause identifiers used in `failures`:
///   pre:smd-source, pre:smd-target, pre:safe-source, pre:safe-target,
///   surjective, 1, 2, 2', 3, 3', 4, 5a, 5b, 5c, 5d, 5e
struct MorphismReport {
  bool valid = true;
  std::vector<Violation> failures;
  std::map<std::string, SequentialComponent> sm_witnesses;  // keyed by source place name

  bool has_clause(const std::string& clause) const {
    return std::any_of(failures.begin(), failures.end(), [&](const Violation& v) { return v.clause == clause; });
  }
  const Violation* failure(const std::string& clause) const {
    for (const auto& v : failures)
      if (v.clause == clause) return &v;
    return nullptr;
  }
  void fail(Violation v) {
    valid = false;
    failures.push_back(std::move(v));
  }
};

struct AlphaOptions {
  bool check_preconditions = true;  // both nets SMD and safe
  ExploreBounds bounds{};
};

namespace detail {

inline std::vector<std::string> names(const PetriNet& net, const std::set<NodeRef>& xs) {
  std::vector<std::string> out;
  for (auto x : xs) out.push_back(net.name_of(x));
  return out;
}

inline std::set<NodeRef> as_set(const std::vector<NodeRef>& xs) { return {xs.begin(), xs.end()}; }

/// nullopt when safe, otherwise a short reason.
inline std::optional<std::string> unsafe_reason(const PetriNet& net, ExploreBounds bounds) {
  bounds.cap = 1;
  auto rg = explore(net, bounds);
  if (rg.unbounded_witness) return "unbounded";
  if (!rg.truncated) {
    for (const auto& m : rg.vertices)
      if (!m.is_set()) return "reachable marking " + net.format(m);
    return std::nullopt;
  }
  if (rg.vertices.size() < bounds.limit) return "some reachable marking puts two tokens on a place";
  return "exploration limit reached before safety was established";
}

/// Nodes of phi^{-1}(p2) as a NodeSet of the source.
inline NodeSet preimage_set(const Morphism& phi, Index p2) {
  NodeSet a(phi.source());
  for (auto x : phi.inverse(NodeRef::place(p2))) a.insert(x);
  return a;
}

inline bool subnet_acyclic(const PetriNet& net, const NodeSet& a) {
  // Kahn's algorithm restricted to A.
  auto members = a.members();
  std::map<NodeRef, std::size_t> indeg;
  for (auto x : members) {
    std::size_t d = 0;
    for (auto y : net.preset(x)) d += a.contains(y);
    indeg[x] = d;
  }
  std::vector<NodeRef> ready;
  for (auto& [x, d] : indeg)
    if (d == 0) ready.push_back(x);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto x = ready.back();
    ready.pop_back();
    ++seen;
    for (auto y : net.postset(x))
      if (a.contains(y) && --indeg[y] == 0) ready.push_back(y);
  }
  return seen == members.size();
}

}  // namespace detail

/// Validates the clauses of an α-morphism. All failing clauses are reported;
/// nothing is short-circuited except clause 5 for places whose preimage is
/// empty (already reported as non-surjective).
inline MorphismReport check_alpha(const Morphism& phi, AlphaOptions opts = {}) {
  const PetriNet& n1 = phi.source();
  const PetriNet& n2 = phi.target();
  MorphismReport r;

  if (opts.check_preconditions) {
    if (!is_smd(n1)) r.fail({"pre:smd-source", {}, n1.name() + " is not state machine decomposable"});
    if (!is_smd(n2)) r.fail({"pre:smd-target", {}, n2.name() + " is not state machine decomposable"});
    if (auto why = detail::unsafe_reason(n1, opts.bounds)) r.fail({"pre:safe-source", {}, *why});
    if (auto why = detail::unsafe_reason(n2, opts.bounds)) r.fail({"pre:safe-target", {}, *why});
  }

  if (auto missing = phi.unhit(); !missing.empty())
    r.fail({"surjective", detail::names(n2, detail::as_set(missing)), "target nodes without preimage"});

  {
    std::vector<std::string> bad;
    for (Index p = 0; p < n1.place_count(); ++p)
      if (!phi.place_image(p).is_place()) bad.push_back(n1.place_name(p));
    if (!bad.empty()) r.fail({"1", bad, "places mapped to transitions"});
  }

  {
    Marking img = phi.image(n1.initial());
    if (img != n2.initial())
      r.fail({"2", n2.names_of(img), "image of m0 is " + n2.format(img) + ", expected " + n2.format(n2.initial())});
  }

  for (Index t1 = 0; t1 < n1.transition_count(); ++t1) {
    NodeRef t = NodeRef::transition(t1);
    NodeRef y = phi(t);
    auto pre = phi.image(n1.preset(t));
    auto post = phi.image(n1.postset(t));
    if (y.is_transition()) {
      if (pre != detail::as_set(n2.preset(y)) || post != detail::as_set(n2.postset(y)))
        r.fail({"3", {n1.transition_name(t1), n2.name_of(y)}, "neighbourhood does not correspond"});
    } else {
      std::set<NodeRef> around = pre;
      around.insert(post.begin(), post.end());
      if (around != std::set<NodeRef>{y})
        r.fail({"4", {n1.transition_name(t1), n2.name_of(y)}, "neighbourhood not collapsed onto the image place"});
    }
  }

  for (Index p2 = 0; p2 < n2.place_count(); ++p2) {
    const std::string& p2name = n2.place_name(p2);
    NodeSet a = detail::preimage_set(phi, p2);
    auto members = a.members();
    if (members.empty()) continue;

    if (a.any_transition() && !detail::subnet_acyclic(n1, a))
      r.fail({"5a", {p2name}, "refining subnet is cyclic"});

    auto boundary = subnet_boundary(n1, a);
    std::set<NodeRef> inputs(boundary.inputs.begin(), boundary.inputs.end());
    std::set<NodeRef> outputs(boundary.outputs.begin(), boundary.outputs.end());
    auto pre2 = detail::as_set(n2.preset(NodeRef::place(p2)));
    auto post2 = detail::as_set(n2.postset(NodeRef::place(p2)));

    for (auto x : members) {
      if (!x.is_place()) continue;
      const std::string& p1name = n1.name_of(x);
      auto pre1 = n1.preset(x);
      auto post1 = n1.postset(x);
      auto img_pre = phi.image(pre1);
      auto img_post = phi.image(post1);
      if (inputs.count(x)) {
        bool subset = std::includes(pre2.begin(), pre2.end(), img_pre.begin(), img_pre.end());
        if (!subset || (!pre2.empty() && pre1.empty()))
          r.fail({"5b", {p1name, p2name}, "input place preset not within the abstract preset"});
      }
      if (outputs.count(x) && img_post != post2)
        r.fail({"5c", {p1name, p2name}, "output place postset image differs from the abstract postset"});
      if (!inputs.count(x) && img_pre != std::set<NodeRef>{NodeRef::place(p2)})
        r.fail({"5d", {p1name, p2name}, "internal place has a preset outside the subnet"});
      if (!outputs.count(x) && img_post != std::set<NodeRef>{NodeRef::place(p2)})
        r.fail({"5d", {p1name, p2name}, "internal place has a postset outside the subnet"});

      IndexList required;
      for (auto t2 : pre2)
        for (auto t1 : phi.inverse(t2)) required.push_back(t1.index);
      for (auto t2 : post2)
        for (auto t1 : phi.inverse(t2)) required.push_back(t1.index);
      std::sort(required.begin(), required.end());
      required.erase(std::unique(required.begin(), required.end()), required.end());
      if (auto c = find_sequential_component(n1, {x.index}, required))
        r.sm_witnesses.emplace(p1name, std::move(*c));
      else
        r.fail({"5e", {p1name, p2name}, "no sequential component through the place and the refined neighbourhood"});
    }
  }
  return r;
}

/// α̂-morphism check between LGWF-nets: all α clauses plus (2') final
/// markings and (3') label preservation. `phi` must be stated over the
/// underlying nets of `src` and `dst`.
inline MorphismReport check_alpha_hat(const Morphism& phi, const LgwfNet& src, const LgwfNet& dst,
                                      AlphaOptions opts = {}) {
  if (!phi.source().same_structure(src.net()) || !phi.target().same_structure(dst.net()))
    throw MapMismatch("morphism is not stated over the given labeled nets");
  MorphismReport r = check_alpha(phi, opts);
  const PetriNet& n1 = src.net();
  const PetriNet& n2 = dst.net();

  Marking img = phi.image(src.final_marking());
  if (img != dst.final_marking())
    r.fail({"2'", n2.names_of(img),
            "image of m_f is " + n2.format(img) + ", expected " + n2.format(dst.final_marking())});

  for (Index t1 = 0; t1 < n1.transition_count(); ++t1) {
    if (!src.labeled(t1)) continue;
    NodeRef y = phi.transition_image(t1);
    if (!y.is_transition()) {
      r.fail({"3'", {n1.transition_name(t1), n2.name_of(y)}, "labeled transition mapped to a place"});
      continue;
    }
    const AsyncLabel* h1 = src.async_label(t1);
    const AsyncLabel* h2 = dst.async_label(y.index);
    if (h1 && (!h2 || *h1 != *h2))
      r.fail({"3'", {n1.transition_name(t1), n2.name_of(y)}, "async label " + h1->str() + " not preserved"});
    const std::string* l1 = src.sync_label(t1);
    const std::string* l2 = dst.sync_label(y.index);
    if (l1 && (!l2 || *l1 != *l2))
      r.fail({"3'", {n1.transition_name(t1), n2.name_of(y)}, "sync label " + *l1 + " not preserved"});
  }
  return r;
}

inline void require_valid(const Morphism& phi, AlphaOptions opts = {}) {
  auto r = check_alpha(phi, opts);
  if (!r.valid) throw InvalidMorphism("not an alpha-morphism: " + describe(r.failures));
}

namespace detail {

inline std::vector<Index> properly_refined_unchecked(const Morphism& phi) {
  std::vector<Index> out;
  for (Index p2 = 0; p2 < phi.target().place_count(); ++p2)
    if (preimage_set(phi, p2).any_transition()) out.push_back(p2);
  return out;
}

inline bool well_marked_unchecked(const Morphism& phi) {
  const PetriNet& n1 = phi.source();
  const PetriNet& n2 = phi.target();
  for (Index p2 : n2.initial().support()) {
    auto b = subnet_boundary(n1, preimage_set(phi, p2));
    for (auto x : b.inputs)
      if (x.is_place() && !n1.initial()[x.index]) return false;
  }
  return true;
}

}  // namespace detail

/// Every input place of a subnet refining an initially marked place is
/// initially marked. Throws InvalidMorphism unless phi is an α-morphism.
inline bool check_well_marked(const Morphism& phi, AlphaOptions opts = {}) {
  require_valid(phi, opts);
  return detail::well_marked_unchecked(phi);
}

/// Target places whose preimage contains a transition.
inline std::set<std::string> properly_refined_places(const Morphism& phi, AlphaOptions opts = {}) {
  require_valid(phi, opts);
  std::set<std::string> out;
  for (Index p2 : detail::properly_refined_unchecked(phi)) out.insert(phi.target().place_name(p2));
  return out;
}

// ---------------------------------------------------------------------------
// Local nets

inline std::string artificial_input(const std::string& p2) { return "⊥in:" + p2; }
inline std::string artificial_output(const std::string& p2) { return "⊥out:" + p2; }

struct LocalNetPair {
  std::string place;  // the abstract place p2
  PetriNet s1;
  PetriNet s2;
  Morphism phi_s;     // s1 -> s2
};

/// S2(p2): p2 with its neighbour transitions; S1(p2): the refining subnet with
/// the preimages of those transitions. One shared artificial input place feeds
/// the preset side and one shared artificial output place collects the
/// postset side; an artificial place is added only when that side is nonempty.
/// Without an input side the initially marked places of the subnet (or p2)
/// carry the initial tokens.
inline LocalNetPair build_local_nets(const Morphism& phi, const std::string& p2name) {
  const PetriNet& n1 = phi.source();
  const PetriNet& n2 = phi.target();
  Index p2 = n2.place(p2name);
  NodeSet a = detail::preimage_set(phi, p2);
  if (!a.any_transition()) throw NotProperlyRefined(p2name);

  auto in2 = n2.place_preset(p2);
  auto out2 = n2.place_postset(p2);
  std::string bin = artificial_input(p2name), bout = artificial_output(p2name);

  // S2
  std::vector<std::string> places2{p2name}, trans2;
  std::vector<std::pair<std::string, std::string>> arcs2;
  std::map<std::string, std::uint32_t> m0_2;
  if (!in2.empty()) {
    places2.push_back(bin);
    m0_2[bin] = 1;
  } else {
    m0_2[p2name] = 1;
  }
  if (!out2.empty()) places2.push_back(bout);
  for (Index t : in2) {
    trans2.push_back(n2.transition_name(t));
    arcs2.emplace_back(bin, n2.transition_name(t));
    arcs2.emplace_back(n2.transition_name(t), p2name);
  }
  for (Index t : out2) {
    trans2.push_back(n2.transition_name(t));
    arcs2.emplace_back(p2name, n2.transition_name(t));
    arcs2.emplace_back(n2.transition_name(t), bout);
  }
  PetriNet s2(n2.name() + "/S2(" + p2name + ")", places2, trans2, arcs2, m0_2);

  // S1
  std::vector<std::string> places1, trans1;
  std::vector<std::pair<std::string, std::string>> arcs1;
  std::map<std::string, std::uint32_t> m0_1;
  std::map<std::string, std::string> map;
  for (auto x : a.members()) {
    const auto& name = n1.name_of(x);
    (x.is_place() ? places1 : trans1).push_back(name);
    map[name] = p2name;
    if (x.is_place() && in2.empty() && n1.initial()[x.index]) m0_1[name] = 1;
    for (auto y : n1.postset(x))
      if (a.contains(y)) arcs1.emplace_back(name, n1.name_of(y));
  }
  if (!in2.empty()) {
    places1.push_back(bin);
    m0_1[bin] = 1;
    map[bin] = bin;
  }
  if (!out2.empty()) {
    places1.push_back(bout);
    map[bout] = bout;
  }
  auto add_boundary = [&](Index t2, bool input_side) {
    for (auto x : phi.inverse(NodeRef::transition(t2))) {
      const auto& name = n1.name_of(x);
      trans1.push_back(name);
      map[name] = n2.transition_name(t2);
      if (input_side) {
        arcs1.emplace_back(bin, name);
        for (auto y : n1.postset(x))
          if (a.contains(y)) arcs1.emplace_back(name, n1.name_of(y));
      } else {
        arcs1.emplace_back(name, bout);
        for (auto y : n1.preset(x))
          if (a.contains(y)) arcs1.emplace_back(n1.name_of(y), name);
      }
    }
  };
  for (Index t : in2) add_boundary(t, true);
  for (Index t : out2) add_boundary(t, false);
  PetriNet s1(n1.name() + "/S1(" + p2name + ")", places1, trans1, arcs1, m0_1);

  auto phi_s = Morphism::from_names(s1, s2, map);
  return {p2name, std::move(s1), std::move(s2), std::move(phi_s)};
}

struct LocalPlaceReport {
  std::string place;
  bool holds = false;
  MorphismReport alpha;  // of phi_s ∘ u
  std::vector<std::string> never_enabled;  // S2 transitions whose preimage never occurs in the unfolding
  std::size_t events = 0;
  std::string error;     // construction failure, if any
};

struct LocalConditionReport {
  bool holds = true;
  std::vector<LocalPlaceReport> places;
};

/// For each properly refined place: build the local nets, unfold S1 and
/// validate phi_s ∘ u as an α-morphism. The unfolding is an occurrence net,
/// hence safe; its SMD precondition is covered by clause 5e.
inline LocalConditionReport check_local_condition(const Morphism& phi, AlphaOptions opts = {}) {
  require_valid(phi, opts);
  LocalConditionReport out;
  for (Index p2 : detail::properly_refined_unchecked(phi)) {
    LocalPlaceReport pr;
    pr.place = phi.target().place_name(p2);
    try {
      auto local = build_local_nets(phi, pr.place);
      auto bp = unfold(local.s1);
      pr.events = bp.events.size();
      auto u = folding(bp);
      auto composed = compose_maps(u, local.phi_s);
      AlphaOptions inner = opts;
      inner.check_preconditions = false;
      pr.alpha = check_alpha(composed, inner);
      for (auto y : composed.unhit())
        if (y.is_transition()) pr.never_enabled.push_back(local.s2.name_of(y));
      pr.holds = pr.alpha.valid;
    } catch (const Error& e) {
      pr.error = e.what();
      pr.holds = false;
    }
    out.holds = out.holds && pr.holds;
    out.places.push_back(std::move(pr));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Behaviour

struct BehaviourReport {
  bool holds = true;
  std::vector<Violation> failures;
  std::size_t source_states = 0;
  std::size_t target_states = 0;
};

/// Every reachable source marking maps to a reachable target marking; every
/// source step maps to a target step (transition image) or to a stutter
/// (place image).
inline BehaviourReport check_preservation(const Morphism& phi, ExploreBounds bounds = {}) {
  const PetriNet& n1 = phi.source();
  const PetriNet& n2 = phi.target();
  auto rg1 = explore(n1, bounds);
  auto rg2 = explore(n2, bounds);
  if (!rg1.complete() || !rg2.complete()) throw IncompleteExploration("preservation needs complete state spaces");
  BehaviourReport r;
  r.source_states = rg1.vertices.size();
  r.target_states = rg2.vertices.size();
  for (const auto& m1 : rg1.vertices) {
    Marking img = phi.image(m1);
    if (!rg2.find(img)) {
      r.holds = false;
      r.failures.push_back({"preservation.marking", n1.names_of(m1), "image " + n2.format(img) + " unreachable"});
    }
  }
  for (const auto& e : rg1.edges) {
    Marking a = phi.image(rg1.vertices[e.from]);
    Marking b = phi.image(rg1.vertices[e.to]);
    NodeRef y = phi.transition_image(e.transition);
    bool ok = y.is_transition() ? enabled(n2, a, y.index) && fire(n2, a, y.index) == b : a == b;
    if (!ok) {
      r.holds = false;
      r.failures.push_back({"preservation.step", {n1.transition_name(e.transition), n2.name_of(y)},
                            "step from " + n1.format(rg1.vertices[e.from]) + " is not simulated"});
    }
  }
  return r;
}

/// Every reachable target marking has a reachable source preimage, and every
/// transition enabled at a target marking has each of its preimages enabled
/// at some source preimage. Requires a sound source unless
/// `enforce_premise` is false; an unsound source raises SourceNotSound.
inline BehaviourReport check_reflection(const Morphism& phi, const Marking& source_final, ExploreBounds bounds = {},
                                        bool enforce_premise = true) {
  const PetriNet& n1 = phi.source();
  const PetriNet& n2 = phi.target();
  if (enforce_premise) {
    std::optional<SoundnessReport> s;
    try {
      s = check_soundness(check_gwf(n1, source_final), bounds);
    } catch (const StructuralViolation& e) {
      throw SourceNotSound(std::string("source is not a GWF-net: ") + e.what());
    }
    if (!s->sound) throw SourceNotSound("source is not sound: " + s->summary);
  }
  auto rg1 = explore(n1, bounds);
  auto rg2 = explore(n2, bounds);
  if (!rg1.complete() || !rg2.complete()) throw IncompleteExploration("reflection needs complete state spaces");
  BehaviourReport r;
  r.source_states = rg1.vertices.size();
  r.target_states = rg2.vertices.size();

  std::set<std::pair<Index, Index>> reported;
  std::map<Marking, std::vector<std::size_t>> preimages;
  for (std::size_t v = 0; v < rg1.vertices.size(); ++v) preimages[phi.image(rg1.vertices[v])].push_back(v);

  for (std::size_t v = 0; v < rg2.vertices.size(); ++v) {
    const Marking& m2 = rg2.vertices[v];
    auto it = preimages.find(m2);
    if (it == preimages.end()) {
      r.holds = false;
      r.failures.push_back({"reflection.marking", n2.names_of(m2), "no reachable preimage of " + n2.format(m2)});
      continue;
    }
    for (auto eid : rg2.out_edges[v]) {
      Index t2 = rg2.edges[eid].transition;
      for (auto t1 : phi.inverse(NodeRef::transition(t2))) {
        bool found = std::any_of(it->second.begin(), it->second.end(),
                                 [&](std::size_t u) { return enabled(n1, rg1.vertices[u], t1.index); });
        if (!found && reported.emplace(t2, t1.index).second) {
          r.holds = false;
          r.failures.push_back({"reflection.transition", {n2.transition_name(t2), n1.transition_name(t1.index)},
                                "not enabled at any preimage of " + n2.format(m2)});
        }
      }
    }
  }
  return r;
}

}  // namespace wfnet
