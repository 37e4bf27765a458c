#pragma once

// Labeled GWF-nets: asynchronous send/receive labels, synchronous labels and
// channel places.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfnet/workflow.hpp"

namespace wfnet {

enum class Direction : std::uint8_t { send, receive };

struct AsyncLabel {
  std::string channel;
  Direction direction = Direction::send;

  std::string str() const { return channel + (direction == Direction::send ? "!" : "?"); }

  /// "c!" or "c?"; nullopt for anything else.
  static std::optional<AsyncLabel> parse(std::string_view s) {
    if (s.size() < 2) return std::nullopt;
    char d = s.back();
    if (d != '!' && d != '?') return std::nullopt;
    std::string ch(s.substr(0, s.size() - 1));
    if (!valid_token(ch) || ch.find_first_of("!?") != std::string::npos) return std::nullopt;
    return AsyncLabel{ch, d == '!' ? Direction::send : Direction::receive};
  }

  friend auto operator<=>(const AsyncLabel&, const AsyncLabel&) = default;
};

inline std::string channel_of(const AsyncLabel& l) { return l.channel; }

inline AsyncLabel complement(const AsyncLabel& l) {
  return {l.channel, l.direction == Direction::send ? Direction::receive : Direction::send};
}

/// Labelings keyed by node name: h (async), ell (sync) and k (channel places).
struct Labels {
  std::map<std::string, AsyncLabel> async;
  std::map<std::string, std::string> sync;
  std::map<std::string, std::string> channel;

  friend bool operator==(const Labels&, const Labels&) = default;
};

class LgwfNet;
LgwfNet validate_lgwf(GwfNet g, const Labels& labels);

/// A GWF-net with validated labelings. Labels are stored by node index.
class LgwfNet {
 public:
  const GwfNet& gwf() const { return gwf_; }
  const PetriNet& net() const { return gwf_.net(); }
  const Marking& final_marking() const { return gwf_.final_marking(); }

  const AsyncLabel* async_label(Index t) const {
    auto it = h_.find(t);
    return it == h_.end() ? nullptr : &it->second;
  }
  const std::string* sync_label(Index t) const {
    auto it = ell_.find(t);
    return it == ell_.end() ? nullptr : &it->second;
  }
  const std::string* channel(Index p) const {
    auto it = k_.find(p);
    return it == k_.end() ? nullptr : &it->second;
  }
  bool labeled(Index t) const { return h_.count(t) || ell_.count(t); }

  const std::map<Index, AsyncLabel>& async_labels() const { return h_; }
  const std::map<Index, std::string>& sync_labels() const { return ell_; }
  const std::map<Index, std::string>& channels() const { return k_; }

  /// Channel place for channel name c, if any.
  std::optional<Index> channel_place(const std::string& c) const {
    for (const auto& [p, name] : k_)
      if (name == c) return p;
    return std::nullopt;
  }

  Labels labels() const {
    Labels l;
    for (const auto& [t, a] : h_) l.async.emplace(net().transition_name(t), a);
    for (const auto& [t, s] : ell_) l.sync.emplace(net().transition_name(t), s);
    for (const auto& [p, c] : k_) l.channel.emplace(net().place_name(p), c);
    return l;
  }

  friend bool operator==(const LgwfNet&, const LgwfNet&) = default;

 private:
  friend LgwfNet validate_lgwf(GwfNet, const Labels&);
  explicit LgwfNet(GwfNet g) : gwf_(std::move(g)) {}

  GwfNet gwf_;
  std::map<Index, AsyncLabel> h_;
  std::map<Index, std::string> ell_;
  std::map<Index, std::string> k_;
};

/// All violated labeling clauses (empty when valid):
///   lgwf.node      label attached to a missing node or a node of the wrong kind
///   lgwf.2         a transition carries both an async and a sync label
///   lgwf.3         k not injective
///   lgwf.3a        some c!/c? pair is not wired through the place labeled c
///   lgwf.3b        a channel place has an empty preset/postset or neighbours with wrong labels
///   lgwf.namespace a name is used both as a channel and as a sync label
///   lgwf.channel-marking  a channel place belongs to m0 or m_f
inline std::vector<Violation> lgwf_violations(const GwfNet& g, const Labels& labels) {
  const PetriNet& net = g.net();
  std::vector<Violation> out;
  std::map<Index, AsyncLabel> h;
  std::map<Index, std::string> ell;
  std::map<Index, std::string> k;

  for (const auto& [name, label] : labels.async) {
    auto r = net.find(name);
    if (!r || !r->is_transition()) {
      out.push_back({"lgwf.node", {name}, "async label on a non-transition"});
      continue;
    }
    h.emplace(r->index, label);
  }
  for (const auto& [name, label] : labels.sync) {
    auto r = net.find(name);
    if (!r || !r->is_transition() || !valid_token(label)) {
      out.push_back({"lgwf.node", {name}, "sync label on a non-transition"});
      continue;
    }
    ell.emplace(r->index, label);
  }
  for (const auto& [name, c] : labels.channel) {
    auto r = net.find(name);
    if (!r || !r->is_place() || !valid_token(c)) {
      out.push_back({"lgwf.node", {name}, "channel label on a non-place"});
      continue;
    }
    k.emplace(r->index, c);
  }

  for (const auto& [t, a] : h)
    if (ell.count(t)) out.push_back({"lgwf.2", {net.transition_name(t)}, "transition in dom(h) and dom(ell)"});

  std::set<std::string> channel_names, sync_names;
  for (const auto& [t, a] : h) channel_names.insert(a.channel);
  for (const auto& [p, c] : k) channel_names.insert(c);
  for (const auto& [t, s] : ell) sync_names.insert(s);
  for (const auto& c : channel_names)
    if (sync_names.count(c)) out.push_back({"lgwf.namespace", {c}, "name used as channel and sync label"});

  std::map<std::string, Index> place_of;
  for (const auto& [p, c] : k) {
    auto [it, fresh] = place_of.emplace(c, p);
    if (!fresh)
      out.push_back({"lgwf.3", {net.place_name(it->second), net.place_name(p)}, "k is not injective on " + c});
  }

  // 3a: every sender/receiver pair of a channel is wired through its labeled place.
  for (const auto& [t1, a1] : h) {
    if (a1.direction != Direction::send) continue;
    for (const auto& [t2, a2] : h) {
      if (a2.direction != Direction::receive || a2.channel != a1.channel) continue;
      auto it = place_of.find(a1.channel);
      bool wired = it != place_of.end() && net.has_arc(NodeRef::transition(t1), NodeRef::place(it->second)) &&
                   net.has_arc(NodeRef::place(it->second), NodeRef::transition(t2));
      if (!wired)
        out.push_back({"lgwf.3a", {net.transition_name(t1), net.transition_name(t2)},
                       "no place labeled " + a1.channel + " connects sender to receiver"});
    }
  }

  // 3b: a channel place connects only c! producers to c? consumers, both nonempty.
  for (const auto& [p, c] : k) {
    auto pre = net.place_preset(p);
    auto post = net.place_postset(p);
    bool ok = !pre.empty() && !post.empty();
    for (Index t : pre) {
      auto it = h.find(t);
      ok = ok && it != h.end() && it->second == AsyncLabel{c, Direction::send};
    }
    for (Index t : post) {
      auto it = h.find(t);
      ok = ok && it != h.end() && it->second == AsyncLabel{c, Direction::receive};
    }
    if (!ok) out.push_back({"lgwf.3b", {net.place_name(p)}, "channel place " + c + " has unlabeled or mislabeled neighbours"});
    if (net.initial()[p] || g.final_marking()[p])
      out.push_back({"lgwf.channel-marking", {net.place_name(p)}, "channel place in m0 or m_f"});
  }
  return out;
}

inline LgwfNet validate_lgwf(GwfNet g, const Labels& labels) {
  auto v = lgwf_violations(g, labels);
  if (!v.empty()) throw LabelViolation(std::move(v));
  LgwfNet n(std::move(g));
  const PetriNet& net = n.net();
  for (const auto& [name, a] : labels.async) n.h_.emplace(net.transition(name), a);
  for (const auto& [name, s] : labels.sync) n.ell_.emplace(net.transition(name), s);
  for (const auto& [name, c] : labels.channel) n.k_.emplace(net.place(name), c);
  return n;
}

/// The underlying GWF-net with all labels erased.
inline GwfNet underlying(const LgwfNet& n) { return n.gwf(); }

/// An LGWF-net without any labels.
inline LgwfNet unlabeled(GwfNet g) { return validate_lgwf(std::move(g), {}); }

}  // namespace wfnet
