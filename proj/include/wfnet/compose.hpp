#pragma once

// Asynchronous-synchronous (AS) composition of labeled GWF-nets.

#include <functional>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfnet/labeled.hpp"

namespace wfnet {

/// Where a node of a composition comes from.
struct Origin {
  enum class Kind { left, right, channel, sync };
  Kind kind = Kind::left;
  std::string first;   // component node name, channel name, or left half of a sync pair
  std::string second;  // right half of a sync pair
  std::vector<Origin> merged;  // places folded into this one by p_simplify

  friend bool operator==(const Origin&, const Origin&) = default;
};

struct Composition {
  LgwfNet result;
  LgwfNet left;   // operands after any renaming
  LgwfNet right;
  std::map<std::string, Origin> provenance;
  std::vector<std::pair<std::string, std::string>> renamed;  // original -> prefixed
};

struct ComposeOptions {
  /// Prefix colliding node names with "1:" / "2:" instead of rejecting them.
  bool auto_prefix = false;
  /// Keep sync-labeled transitions that find no partner, with their label, so
  /// they can synchronize in a later composition step.
  bool keep_unmatched_sync = true;
};

inline std::string sync_name(const std::string& t1, const std::string& t2) {
  return "(" + t1 + "," + t2 + ")";
}

/// Splits "(a,b)" at its top-level comma; nullopt if `s` is not a pair.
inline std::optional<std::pair<std::string, std::string>> split_sync_name(const std::string& s) {
  if (s.size() < 5 || s.front() != '(' || s.back() != ')') return std::nullopt;
  int depth = 0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == ',' && depth == 0) return std::make_pair(s.substr(1, i - 1), s.substr(i + 1, s.size() - i - 2));
    if (depth < 0) return std::nullopt;
  }
  return std::nullopt;
}

/// Applies `rename` to every node name, keeping structure and labels.
inline LgwfNet rename_nodes(const LgwfNet& n, const std::function<std::string(const std::string&)>& rename,
                            std::string net_name = {}) {
  const PetriNet& net = n.net();
  std::vector<std::string> places, transitions;
  for (const auto& p : net.places()) places.push_back(rename(p));
  for (const auto& t : net.transitions()) transitions.push_back(rename(t));
  std::vector<std::pair<std::string, std::string>> arcs;
  for (const auto& [a, b] : net.arcs()) arcs.emplace_back(rename(a), rename(b));
  std::map<std::string, std::uint32_t> m0;
  for (Index p : net.initial().support()) m0[rename(net.place_name(p))] = net.initial()[p];
  PetriNet renamed(net_name.empty() ? net.name() : net_name, places, transitions, arcs, m0);
  std::set<std::string> final;
  for (Index p : n.final_marking().support()) final.insert(rename(net.place_name(p)));
  Labels l;
  for (const auto& [t, a] : n.async_labels()) l.async.emplace(rename(net.transition_name(t)), a);
  for (const auto& [t, s] : n.sync_labels()) l.sync.emplace(rename(net.transition_name(t)), s);
  for (const auto& [p, c] : n.channels()) l.channel.emplace(rename(net.place_name(p)), c);
  return validate_lgwf(check_gwf(std::move(renamed), final), l);
}

/// N1 ⊛ N2.
///
/// Unlabeled places of both operands are kept; each channel with a sender and
/// a receiver anywhere in the operands gets one fresh place named after the
/// channel, wired from every c! to every c?. Transitions with equal sync labels
/// are merged pairwise into "(t1,t2)". m0 and m_f are unions. The result is
/// validated as an LGWF-net.
inline Composition as_compose(const LgwfNet& n1_in, const LgwfNet& n2_in, ComposeOptions opts = {}) {
  std::vector<std::pair<std::string, std::string>> renamed;
  std::set<std::string> names1;
  for (auto x : n1_in.net().nodes()) names1.insert(n1_in.net().name_of(x));
  std::set<std::string> clash;
  for (auto x : n2_in.net().nodes())
    if (names1.count(n2_in.net().name_of(x))) clash.insert(n2_in.net().name_of(x));

  std::optional<LgwfNet> n1_renamed, n2_renamed;
  if (!clash.empty()) {
    if (!opts.auto_prefix)
      throw ComponentsNotDisjoint("components share node names", {clash.begin(), clash.end()});
    auto prefix = [&](const std::string& tag) {
      return [&clash, tag, &renamed](const std::string& s) {
        if (!clash.count(s)) return s;
        renamed.emplace_back(s, tag + s);
        return tag + s;
      };
    };
    n1_renamed = rename_nodes(n1_in, prefix("1:"));
    n2_renamed = rename_nodes(n2_in, prefix("2:"));
    std::sort(renamed.begin(), renamed.end());
    renamed.erase(std::unique(renamed.begin(), renamed.end()), renamed.end());
  }
  const LgwfNet& n1 = n1_renamed ? *n1_renamed : n1_in;
  const LgwfNet& n2 = n2_renamed ? *n2_renamed : n2_in;
  const PetriNet& a = n1.net();
  const PetriNet& b = n2.net();

  std::map<std::string, Origin> prov;
  std::vector<std::string> places, transitions;
  std::vector<std::pair<std::string, std::string>> arcs;
  std::map<std::string, std::uint32_t> m0;
  std::set<std::string> mf;
  Labels labels;

  auto add_unlabeled_places = [&](const LgwfNet& n, Origin::Kind side) {
    for (Index p = 0; p < n.net().place_count(); ++p) {
      if (n.channel(p)) continue;
      const auto& name = n.net().place_name(p);
      places.push_back(name);
      prov[name] = {side, name, {}, {}};
      if (n.net().initial()[p]) m0[name] = n.net().initial()[p];
      if (n.final_marking()[p]) mf.insert(name);
    }
  };
  add_unlabeled_places(n1, Origin::Kind::left);
  add_unlabeled_places(n2, Origin::Kind::right);

  // Sync pairing.
  std::multimap<std::string, Index> sync2;
  for (const auto& [t, s] : n2.sync_labels()) sync2.emplace(s, t);
  std::set<std::string> labels1;
  for (const auto& [t, s] : n1.sync_labels()) labels1.insert(s);
  auto matched1 = [&](Index t) {
    auto s = n1.sync_label(t);
    return s && sync2.count(*s);
  };
  auto matched2 = [&](Index t) {
    auto s = n2.sync_label(t);
    return s && labels1.count(*s);
  };

  // Asynchronous (non-merged) transitions of each side.
  struct Async {
    const LgwfNet* net;
    Index t;
    Origin::Kind side;
  };
  std::vector<Async> async_ts;
  for (Index t = 0; t < a.transition_count(); ++t)
    if (!n1.sync_label(t) || (opts.keep_unmatched_sync && !matched1(t))) async_ts.push_back({&n1, t, Origin::Kind::left});
  for (Index t = 0; t < b.transition_count(); ++t)
    if (!n2.sync_label(t) || (opts.keep_unmatched_sync && !matched2(t))) async_ts.push_back({&n2, t, Origin::Kind::right});

  std::set<std::string> senders, receivers;
  for (const auto& x : async_ts)
    if (auto l = x.net->async_label(x.t)) (l->direction == Direction::send ? senders : receivers).insert(l->channel);
  std::set<std::string> channels;
  for (const auto& c : senders)
    if (receivers.count(c)) channels.insert(c);

  std::set<std::string> taken(places.begin(), places.end());
  for (const auto& x : async_ts) taken.insert(x.net->net().transition_name(x.t));
  for (const auto& c : channels) {
    if (taken.count(c)) throw ComponentsNotDisjoint("channel place name collides with a component node", {c});
    places.push_back(c);
    prov[c] = {Origin::Kind::channel, c, {}, {}};
    labels.channel[c] = c;
  }

  auto keeps_place = [](const LgwfNet& n, Index p) { return n.channel(p) == nullptr; };

  for (const auto& x : async_ts) {
    const PetriNet& net = x.net->net();
    const auto& name = net.transition_name(x.t);
    transitions.push_back(name);
    prov[name] = {x.side, name, {}, {}};
    for (Index p : net.transition_preset(x.t))
      if (keeps_place(*x.net, p)) arcs.emplace_back(net.place_name(p), name);
    for (Index p : net.transition_postset(x.t))
      if (keeps_place(*x.net, p)) arcs.emplace_back(name, net.place_name(p));
    if (auto l = x.net->async_label(x.t)) {
      labels.async[name] = *l;
      if (channels.count(l->channel)) {
        if (l->direction == Direction::send) arcs.emplace_back(name, l->channel);
        else arcs.emplace_back(l->channel, name);
      }
    }
    if (auto s = x.net->sync_label(x.t)) labels.sync[name] = *s;
  }

  for (const auto& [t1, s] : n1.sync_labels()) {
    auto [lo, hi] = sync2.equal_range(s);
    for (auto it = lo; it != hi; ++it) {
      Index t2 = it->second;
      std::string name = sync_name(a.transition_name(t1), b.transition_name(t2));
      if (taken.count(name)) throw ComponentsNotDisjoint("sync transition name collides", {name});
      transitions.push_back(name);
      prov[name] = {Origin::Kind::sync, a.transition_name(t1), b.transition_name(t2), {}};
      labels.sync[name] = s;
      for (Index p : a.transition_preset(t1))
        if (keeps_place(n1, p)) arcs.emplace_back(a.place_name(p), name);
      for (Index p : a.transition_postset(t1))
        if (keeps_place(n1, p)) arcs.emplace_back(name, a.place_name(p));
      for (Index p : b.transition_preset(t2))
        if (keeps_place(n2, p)) arcs.emplace_back(b.place_name(p), name);
      for (Index p : b.transition_postset(t2))
        if (keeps_place(n2, p)) arcs.emplace_back(name, b.place_name(p));
    }
  }

  std::string name = a.name() + "*" + b.name();
  PetriNet net(name, places, transitions, arcs, m0);
  auto result = validate_lgwf(check_gwf(std::move(net), mf), labels);
  return Composition{std::move(result), n1, n2, std::move(prov), std::move(renamed)};
}

/// Left-to-right fold of binary composition.
inline Composition compose_all(const std::vector<LgwfNet>& nets, ComposeOptions opts = {}) {
  if (nets.size() < 2) throw Error("compose_all needs at least two nets");
  Composition c = as_compose(nets[0], nets[1], opts);
  for (std::size_t i = 2; i < nets.size(); ++i) c = as_compose(c.result, nets[i], opts);
  return c;
}

/// Merges unlabeled places with equal presets and postsets until the net is
/// P-simple. The lexicographically smallest name of each group survives and
/// records the others in its provenance.
inline Composition p_simplify(const Composition& c) {
  const LgwfNet& n = c.result;
  const PetriNet& net = n.net();
  std::map<std::pair<IndexList, IndexList>, std::vector<Index>> groups;
  for (Index p = 0; p < net.place_count(); ++p) {
    if (n.channel(p)) continue;
    auto pre = net.place_preset(p);
    auto post = net.place_postset(p);
    groups[{IndexList(pre.begin(), pre.end()), IndexList(post.begin(), post.end())}].push_back(p);
  }
  std::set<Index> dropped;
  Composition out{c.result, c.left, c.right, c.provenance, c.renamed};
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    auto& survivor = out.provenance[net.place_name(members.front())];
    for (std::size_t i = 1; i < members.size(); ++i) {
      dropped.insert(members[i]);
      const auto& gone = net.place_name(members[i]);
      Origin o = out.provenance[gone];
      auto inner = std::move(o.merged);
      o.merged.clear();
      survivor.merged.push_back(o);
      for (auto& x : inner) survivor.merged.push_back(x);
      out.provenance.erase(gone);
    }
  }
  if (dropped.empty()) return out;

  std::vector<std::string> places;
  for (Index p = 0; p < net.place_count(); ++p)
    if (!dropped.count(p)) places.push_back(net.place_name(p));
  std::vector<std::pair<std::string, std::string>> arcs;
  for (const auto& [x, y] : net.arcs()) {
    auto rx = net.node(x), ry = net.node(y);
    if ((rx.is_place() && dropped.count(rx.index)) || (ry.is_place() && dropped.count(ry.index))) continue;
    arcs.emplace_back(x, y);
  }
  std::map<std::string, std::uint32_t> m0;
  for (Index p : net.initial().support())
    if (!dropped.count(p)) m0[net.place_name(p)] = net.initial()[p];
  std::set<std::string> mf;
  for (Index p : n.final_marking().support())
    if (!dropped.count(p)) mf.insert(net.place_name(p));
  PetriNet simplified(net.name(), places, net.transitions(), arcs, m0);
  out.result = validate_lgwf(check_gwf(std::move(simplified), mf), n.labels());
  return out;
}

/// Marking of a composition split into its component and channel parts.
/// `left`/`right` are markings of the operand nets, `channels` a marking of
/// the composition supported on channel places.
struct MarkingDecomposition {
  Marking left;
  Marking right;
  Marking channels;
};

/// Projects m onto the operands by provenance, without replay.
inline MarkingDecomposition decompose_marking(const Composition& c, const Marking& m) {
  const PetriNet& net = c.result.net();
  MarkingDecomposition d{c.left.net().empty_marking(), c.right.net().empty_marking(), net.empty_marking()};
  for (Index p = 0; p < net.place_count(); ++p) {
    if (!m[p]) continue;
    const Origin& o = c.provenance.at(net.place_name(p));
    auto put = [&](const Origin& x) {
      switch (x.kind) {
        case Origin::Kind::left: d.left.set(c.left.net().place(x.first), m[p]); break;
        case Origin::Kind::right: d.right.set(c.right.net().place(x.first), m[p]); break;
        case Origin::Kind::channel: d.channels.set(p, m[p]); break;
        case Origin::Kind::sync: break;
      }
    };
    put(o);
    for (const auto& inner : o.merged) put(inner);
  }
  return d;
}

/// Projects a firing sequence of the composition onto one operand.
inline std::vector<std::string> project_firing(const Composition& c, const std::vector<std::string>& firing,
                                               Origin::Kind side) {
  std::vector<std::string> out;
  for (const auto& t : firing) {
    const Origin& o = c.provenance.at(t);
    if (o.kind == side) out.push_back(o.first);
    else if (o.kind == Origin::Kind::sync) out.push_back(side == Origin::Kind::left ? o.first : o.second);
  }
  return out;
}

/// Verified decomposition: `firing` must lead from the initial marking of the
/// composition to m; its projections are replayed in each operand and the
/// reached operand markings must agree with m outside channel places. The
/// returned left/right markings are those reached in the operands.
inline MarkingDecomposition decompose_marking(const Composition& c, const Marking& m,
                                              const std::vector<std::string>& firing) {
  const PetriNet& net = c.result.net();
  Marking reached;
  try {
    reached = replay(net, net.initial(), firing);
  } catch (const NotEnabled& e) {
    throw NotReachable(std::string("firing sequence does not replay in the composition: ") + e.what());
  }
  if (reached != m) throw NotReachable("firing sequence does not reach " + net.format(m));
  auto d = decompose_marking(c, m);
  auto check_side = [&](const LgwfNet& n, Origin::Kind side, const Marking& projected) {
    Marking got;
    try {
      got = replay(n.net(), n.net().initial(), project_firing(c, firing, side));
    } catch (const NotEnabled& e) {
      throw NotReachable(std::string("projected sequence does not replay in ") + n.net().name() + ": " + e.what());
    }
    for (Index p = 0; p < n.net().place_count(); ++p)
      if (!n.channel(p) && got[p] != projected[p])
        throw NotReachable("projection onto " + n.net().name() + " disagrees at " + n.net().place_name(p));
    return got;
  };
  d.left = check_side(c.left, Origin::Kind::left, d.left);
  d.right = check_side(c.right, Origin::Kind::right, d.right);
  return d;
}

}  // namespace wfnet
