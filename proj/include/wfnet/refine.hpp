#pragma once

// Soundness by construction: intermediate refinements of an interface,
// certificates, and the composition of two intermediate refinements.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfnet/alpha.hpp"
#include "wfnet/compose.hpp"
#include "wfnet/isomorphism.hpp"

namespace wfnet {

/// Two refined components r1, r2 with abstractions n1, n2 and maps
/// phi1: r1 -> n1, phi2: r2 -> n2.
struct RefinementScenario {
  std::string name;
  LgwfNet r1, r2, n1, n2;
  Morphism phi1, phi2;
};

enum class Side { left, right };

struct IntermediateRefinement {
  Side side = Side::left;
  Composition composition;  // r1*n2 or n1*r2
  Composition interface;    // n1*n2
  Morphism to_interface;
  MorphismReport report;                // α̂ check of to_interface
  std::vector<Violation> channel_arcs;  // failed channel-arc reflection
  std::vector<Violation> construction;  // images that could not be resolved

  bool valid() const { return report.valid && channel_arcs.empty() && construction.empty(); }
};

namespace detail {

/// Image in the interface of a node of the refined operand (`refined`
/// maps it into the abstract operand).
inline std::optional<std::string> abstract_image(const Morphism& phi, const LgwfNet& abstract_side,
                                                 const Composition& interface, Side side, const std::string& x) {
  NodeRef y = phi(phi.source().node(x));
  const std::string& name = abstract_side.net().name_of(y);
  if (interface.result.net().find(name)) return name;
  // A sync-labeled abstract transition survives only inside pairs; accept a
  // unique partner.
  std::optional<std::string> found;
  for (const auto& [node, o] : interface.provenance) {
    if (o.kind != Origin::Kind::sync) continue;
    if ((side == Side::left ? o.first : o.second) != name) continue;
    if (found) return std::nullopt;
    found = node;
  }
  return found;
}

}  // namespace detail

/// Builds r1*n2 (left) or n1*r2 (right) with the induced map onto n1*n2:
/// the side's morphism on refined nodes, identity on the other operand and on
/// channel places, and (a,b) -> (phi(a),b) (resp. (a,phi(b))) on sync pairs.
/// The map is validated as an α̂-morphism, and channel arcs of the interface
/// are checked to be fully reflected.
inline IntermediateRefinement intermediate_refinement(const RefinementScenario& s, Side side,
                                                      AlphaOptions opts = {}) {
  const bool left = side == Side::left;
  const LgwfNet& abstract = left ? s.n1 : s.n2;
  const Morphism& phi = left ? s.phi1 : s.phi2;
  IntermediateRefinement ir{side, left ? as_compose(s.r1, s.n2) : as_compose(s.n1, s.r2), as_compose(s.n1, s.n2),
                            {}, {}, {}, {}};
  const PetriNet& src = ir.composition.result.net();
  const PetriNet& dst = ir.interface.result.net();
  const Origin::Kind refined_kind = left ? Origin::Kind::left : Origin::Kind::right;

  std::map<std::string, std::string> map;
  for (auto x : src.nodes()) {
    const std::string& name = src.name_of(x);
    const Origin& o = ir.composition.provenance.at(name);
    std::optional<std::string> image;
    if (o.kind == refined_kind) {
      image = detail::abstract_image(phi, abstract, ir.interface, side, o.first);
    } else if (o.kind == Origin::Kind::sync) {
      const std::string& mine = left ? o.first : o.second;
      NodeRef y = phi(phi.source().node(mine));
      const std::string& abs = abstract.net().name_of(y);
      std::string pair = left ? sync_name(abs, o.second) : sync_name(o.first, abs);
      if (dst.find(pair)) image = pair;
    } else if (dst.find(name)) {
      image = name;
    }
    if (image) map[name] = *image;
    else ir.construction.push_back({"intermediate.map", {name}, "no image in the interface"});
  }
  if (!ir.construction.empty()) return ir;
  ir.to_interface = Morphism::from_names(src, dst, map);
  ir.report = check_alpha_hat(ir.to_interface, ir.composition.result, ir.interface.result, opts);

  const LgwfNet& iface = ir.interface.result;
  for (const auto& [p, c] : iface.channels()) {
    auto pre_images = ir.to_interface.inverse(NodeRef::place(p));
    if (pre_images.size() != 1 || !pre_images.front().is_place()) {
      ir.channel_arcs.push_back({"channel-arc", {c}, "channel place is not reflected by a single place"});
      continue;
    }
    NodeRef q = pre_images.front();
    for (Index t : dst.place_postset(p))
      for (auto t1 : ir.to_interface.inverse(NodeRef::transition(t)))
        if (!src.has_arc(q, t1))
          ir.channel_arcs.push_back({"channel-arc", {src.name_of(q), src.name_of(t1)}, "missing channel arc"});
    for (Index t : dst.place_preset(p))
      for (auto t1 : ir.to_interface.inverse(NodeRef::transition(t)))
        if (!src.has_arc(t1, q))
          ir.channel_arcs.push_back({"channel-arc", {src.name_of(t1), src.name_of(q)}, "missing channel arc"});
  }
  return ir;
}

// ---------------------------------------------------------------------------
// Certificates

struct Premise {
  std::string name;
  bool holds = false;
  std::string detail;
};

struct Certificate {
  std::string scenario;
  bool certified = false;
  std::vector<Premise> premises;
  std::map<std::string, SoundnessReport> soundness;  // r1, r2, n1, n2, interface
  std::map<std::string, MorphismReport> morphisms;   // phi1, phi2
  std::map<std::string, LocalConditionReport> local_conditions;
  std::optional<SoundnessReport> audit;  // explicit check of r1*r2
  std::string conclusion;

  std::vector<std::string> failed_premises() const {
    std::vector<std::string> out;
    for (const auto& p : premises)
      if (!p.holds) out.push_back(p.name);
    return out;
  }
  bool refused_for(const std::string& premise) const {
    for (const auto& p : premises)
      if (p.name == premise) return !p.holds;
    return false;
  }
};

namespace detail {

inline Premise soundness_premise(const std::string& name, const GwfNet& g, ExploreBounds bounds,
                                 std::map<std::string, SoundnessReport>& store, const std::string& key) {
  try {
    auto r = check_soundness(g, bounds);
    store[key] = r;
    return {name, r.sound, r.summary};
  } catch (const IncompleteExploration& e) {
    return {name, false, std::string("inconclusive: ") + e.what()};
  }
}

}  // namespace detail

/// Checks every premise of the refinement argument and certifies r1*r2 sound
/// when all hold. The composed system itself is explored only in audit mode.
inline Certificate certify(const RefinementScenario& s, ExploreBounds bounds = {}, bool audit = false) {
  Certificate c;
  c.scenario = s.name;
  AlphaOptions opts{true, bounds};

  c.premises.push_back(detail::soundness_premise("component-soundness:r1", s.r1.gwf(), bounds, c.soundness, "r1"));
  c.premises.push_back(detail::soundness_premise("component-soundness:r2", s.r2.gwf(), bounds, c.soundness, "r2"));
  c.premises.push_back(detail::soundness_premise("component-soundness:n1", s.n1.gwf(), bounds, c.soundness, "n1"));
  c.premises.push_back(detail::soundness_premise("component-soundness:n2", s.n2.gwf(), bounds, c.soundness, "n2"));

  auto morphism_premises = [&](const std::string& tag, const Morphism& phi, const LgwfNet& r, const LgwfNet& n) {
    MorphismReport m;
    try {
      m = check_alpha_hat(phi, r, n, opts);
    } catch (const Error& e) {
      m.fail({"map", {}, e.what()});
    }
    c.morphisms[tag] = m;
    c.premises.push_back({"alpha-hat:" + tag, m.valid, m.valid ? "valid" : describe(m.failures)});
    if (!m.valid) {
      c.premises.push_back({"local-condition:" + tag, false, "not checked: morphism invalid"});
      return;
    }
    auto lc = check_local_condition(phi, opts);
    std::string detail = lc.holds ? "holds" : "";
    for (const auto& p : lc.places) {
      if (p.holds) continue;
      detail += (detail.empty() ? "" : "; ") + p.place + ":";
      if (!p.error.empty()) detail += " " + p.error;
      if (!p.never_enabled.empty()) {
        detail += " never enabled";
        for (const auto& t : p.never_enabled) detail += " " + t;
      }
      if (p.error.empty() && p.never_enabled.empty()) detail += " " + describe(p.alpha.failures);
    }
    c.local_conditions[tag] = lc;
    c.premises.push_back({"local-condition:" + tag, lc.holds, detail});
  };
  morphism_premises("phi1", s.phi1, s.r1, s.n1);
  morphism_premises("phi2", s.phi2, s.r2, s.n2);

  std::optional<Composition> iface;
  try {
    iface = as_compose(s.n1, s.n2);
    c.premises.push_back(detail::soundness_premise("interface-soundness", iface->result.gwf(), bounds, c.soundness,
                                                   "interface"));
  } catch (const Error& e) {
    c.premises.push_back({"interface-soundness", false, std::string("composition failed: ") + e.what()});
  }

  for (Side side : {Side::left, Side::right}) {
    std::string name = side == Side::left ? "intermediate:left" : "intermediate:right";
    bool morphisms_ok = c.morphisms["phi1"].valid && c.morphisms["phi2"].valid;
    if (!iface || !morphisms_ok) {
      c.premises.push_back({name, false, "not checked"});
      continue;
    }
    try {
      auto ir = intermediate_refinement(s, side, opts);
      std::vector<Violation> all = ir.construction;
      all.insert(all.end(), ir.report.failures.begin(), ir.report.failures.end());
      all.insert(all.end(), ir.channel_arcs.begin(), ir.channel_arcs.end());
      c.premises.push_back({name, ir.valid(), ir.valid() ? "valid" : describe(all)});
    } catch (const Error& e) {
      c.premises.push_back({name, false, e.what()});
    }
  }

  c.certified = c.failed_premises().empty();
  c.conclusion = c.certified
                     ? "certified: r1*r2 is sound (sound interface refined on each side by label-preserving "
                       "morphisms satisfying the local condition)"
                     : "not certified: failed premises";
  if (!c.certified)
    for (const auto& p : c.failed_premises()) c.conclusion += " " + p;

  if (audit) {
    try {
      c.audit = check_soundness(as_compose(s.r1, s.r2).result.gwf(), bounds);
    } catch (const Error& e) {
      SoundnessReport r;
      r.summary = std::string("audit failed: ") + e.what();
      c.audit = r;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Composition of intermediate refinements

struct RefinementComposition {
  LgwfNet net;
  Morphism to_left;   // net -> r1*n2
  Morphism to_right;  // net -> n1*r2
};

/// Substitutes both refinements into the shared interface: each interface
/// node is replaced by the product of its two fibres. Where one fibre is a
/// single node the other side's nodes are kept as they are; sync transitions
/// become pairs of their refined halves. Arcs exist where each projection is
/// an arc or stays on the same node. Throws NonCommutingDiagram if some node
/// reaches the interface differently along the two sides.
inline RefinementComposition compose_refinements(const LgwfNet& Ln, const Morphism& fl, const LgwfNet& Rn,
                                                 const Morphism& fr) {
  if (!fl.target().same_structure(fr.target()))
    throw MapMismatch("intermediate refinements target different interfaces");
  if (!fl.source().same_structure(Ln.net()) || !fr.source().same_structure(Rn.net()))
    throw MapMismatch("morphism is not stated over the given intermediate net");
  const PetriNet& iface = fl.target();
  const PetriNet& L = fl.source();
  const PetriNet& R = fr.source();

  struct Node {
    NodeRef l, r;
    NodeKind kind;
    std::string name;
  };
  std::vector<Node> nodes;
  for (auto y : iface.nodes()) {
    auto fibre_l = fl.inverse(y);
    auto fibre_r = fr.inverse(y);
    bool trivial_l = fibre_l.size() == 1 && fibre_l.front().kind == y.kind;
    bool trivial_r = fibre_r.size() == 1 && fibre_r.front().kind == y.kind;
    bool is_sync = y.is_transition() && split_sync_name(iface.name_of(y));
    for (auto a : fibre_l) is_sync = is_sync && split_sync_name(L.name_of(a));
    for (auto b : fibre_r) is_sync = is_sync && split_sync_name(R.name_of(b));
    for (auto a : fibre_l)
      for (auto b : fibre_r) {
        if (y.is_place() && !trivial_l && !trivial_r) continue;
        NodeKind kind = trivial_l ? b.kind : a.kind;
        if (y.is_place() && trivial_l && trivial_r) kind = NodeKind::place;
        std::string name;
        if (is_sync) {
          auto sl = split_sync_name(L.name_of(a));
          auto sr = split_sync_name(R.name_of(b));
          name = sync_name(sl->first, sr->second);
        } else {
          name = trivial_l ? R.name_of(b) : L.name_of(a);
        }
        nodes.push_back({a, b, kind, name});
      }
  }

  std::vector<std::string> places, transitions;
  std::vector<std::pair<std::string, std::string>> arcs;
  std::map<std::string, std::uint32_t> m0;
  std::set<std::string> mf;
  Labels labels;
  std::map<std::string, std::string> to_l, to_r;
  for (const auto& n : nodes) {
    to_l[n.name] = L.name_of(n.l);
    to_r[n.name] = R.name_of(n.r);
    if (n.kind == NodeKind::place) {
      places.push_back(n.name);
      // Both projections of a place node are places.
      if (L.initial()[n.l.index] && R.initial()[n.r.index]) m0[n.name] = 1;
      if (Ln.final_marking()[n.l.index] && Rn.final_marking()[n.r.index]) mf.insert(n.name);
      const std::string* c = Ln.channel(n.l.index);
      if (!c) c = Rn.channel(n.r.index);
      if (c) labels.channel[n.name] = *c;
    } else {
      transitions.push_back(n.name);
      const AsyncLabel* h = n.l.is_transition() ? Ln.async_label(n.l.index) : nullptr;
      if (!h && n.r.is_transition()) h = Rn.async_label(n.r.index);
      if (h) labels.async[n.name] = *h;
      const std::string* s = n.l.is_transition() ? Ln.sync_label(n.l.index) : nullptr;
      if (!s && n.r.is_transition()) s = Rn.sync_label(n.r.index);
      if (s) labels.sync[n.name] = *s;
    }
  }
  auto step = [](const PetriNet& net, NodeRef a, NodeRef b) { return a == b || net.has_arc(a, b); };
  for (const auto& x : nodes)
    for (const auto& z : nodes) {
      if (x.kind == z.kind) continue;
      if (x.l == z.l && x.r == z.r) continue;
      if (step(L, x.l, z.l) && step(R, x.r, z.r)) arcs.emplace_back(x.name, z.name);
    }

  PetriNet net(L.name() + "+" + R.name(), places, transitions, arcs, m0);
  auto result = validate_lgwf(check_gwf(std::move(net), mf), labels);
  auto ml = Morphism::from_names(result.net(), L, to_l);
  auto mr = Morphism::from_names(result.net(), R, to_r);
  for (auto x : result.net().nodes())
    if (fl(ml(x)) != fr(mr(x))) throw NonCommutingDiagram(result.net().name_of(x));
  return {std::move(result), std::move(ml), std::move(mr)};
}

inline RefinementComposition compose_refinements(const IntermediateRefinement& left,
                                                 const IntermediateRefinement& right) {
  return compose_refinements(left.composition.result, left.to_interface, right.composition.result,
                             right.to_interface);
}

}  // namespace wfnet
