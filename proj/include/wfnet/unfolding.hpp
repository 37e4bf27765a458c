#pragma once

// Branching processes and unfoldings of safe nets.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfnet/morphism.hpp"

namespace wfnet {

struct Condition {
  Index place;                     // image in the source net
  std::optional<std::size_t> pre;  // producing event; nullopt for minimal conditions
  std::vector<std::size_t> post;   // consuming events
};

struct Event {
  Index transition;
  std::vector<std::size_t> preset;   // condition ids, ordered by place index
  std::vector<std::size_t> postset;  // condition ids, ordered by place index
};

/// A branching process of `source`: conditions and events with their
/// foldings. Condition i is named "b<i>" and event j "e<j>" in the occurrence
/// net; ids follow construction order and are deterministic.
struct BranchingProcess {
  PetriNet source;
  std::vector<Condition> conditions;
  std::vector<Event> events;
  bool partial = false;  // stopped at the depth bound with extensions left

  static std::string condition_name(std::size_t i) { return "b" + std::to_string(i); }
  static std::string event_name(std::size_t i) { return "e" + std::to_string(i); }

  /// The occurrence net O; minimal conditions carry one token each.
  PetriNet occurrence_net() const {
    std::vector<std::string> places, transitions;
    std::vector<std::pair<std::string, std::string>> arcs;
    std::map<std::string, std::uint32_t> m0;
    for (std::size_t i = 0; i < conditions.size(); ++i) {
      places.push_back(condition_name(i));
      if (!conditions[i].pre) m0[condition_name(i)] = 1;
    }
    for (std::size_t j = 0; j < events.size(); ++j) {
      transitions.push_back(event_name(j));
      for (auto b : events[j].preset) arcs.emplace_back(condition_name(b), event_name(j));
      for (auto b : events[j].postset) arcs.emplace_back(event_name(j), condition_name(b));
    }
    return PetriNet(source.name() + "/unfolding", places, transitions, arcs, m0, PetriNet::Checks::relaxed);
  }

  /// Occurrence counts per source transition.
  std::vector<std::size_t> occurrences() const {
    std::vector<std::size_t> n(source.transition_count(), 0);
    for (const auto& e : events) ++n[e.transition];
    return n;
  }
};

/// The folding u: O -> N as a morphism.
inline Morphism folding(const BranchingProcess& bp) {
  PetriNet occ = bp.occurrence_net();
  std::vector<NodeRef> pi(occ.place_count()), ti(occ.transition_count());
  for (std::size_t i = 0; i < bp.conditions.size(); ++i)
    pi[occ.place(BranchingProcess::condition_name(i))] = NodeRef::place(bp.conditions[i].place);
  for (std::size_t j = 0; j < bp.events.size(); ++j)
    ti[occ.transition(BranchingProcess::event_name(j))] = NodeRef::transition(bp.events[j].transition);
  return Morphism(std::move(occ), bp.source, std::move(pi), std::move(ti));
}

namespace detail {

class Unfolder {
 public:
  explicit Unfolder(const PetriNet& net) : net_(net) {
    bp_.source = net;
    by_place_.resize(net.place_count());
    const Marking& m0 = net.initial();
    for (Index p = 0; p < net.place_count(); ++p) {
      if (m0[p] > 1) throw UnsafeNet("initial marking puts " + std::to_string(m0[p]) + " tokens on " + net.place_name(p));
      if (m0[p]) new_condition(p, std::nullopt);
    }
    for (std::size_t a = 0; a < co_.size(); ++a)
      for (std::size_t b = 0; b < co_.size(); ++b)
        if (a != b) co_[a].insert(b);
  }

  BranchingProcess run(std::size_t depth) {
    while (true) {
      auto ext = possible_extensions();
      if (ext.empty()) break;
      for (auto& [t, preset] : ext) {
        if (bp_.events.size() >= depth) {
          bp_.partial = true;
          return std::move(bp_);
        }
        add_event(t, preset);
      }
    }
    return std::move(bp_);
  }

 private:
  std::size_t new_condition(Index p, std::optional<std::size_t> pre) {
    bp_.conditions.push_back({p, pre, {}});
    co_.emplace_back();
    by_place_[p].push_back(bp_.conditions.size() - 1);
    return bp_.conditions.size() - 1;
  }

  using Extension = std::pair<Index, std::vector<std::size_t>>;

  std::vector<Extension> possible_extensions() const {
    std::vector<Extension> out;
    for (Index t = 0; t < net_.transition_count(); ++t) {
      auto pre = net_.transition_preset(t);
      std::vector<std::size_t> chosen;
      extend(t, pre, 0, chosen, out);
    }
    std::sort(out.begin(), out.end(), [](const Extension& a, const Extension& b) {
      auto ka = *std::max_element(a.second.begin(), a.second.end());
      auto kb = *std::max_element(b.second.begin(), b.second.end());
      return std::tie(ka, a.first, a.second) < std::tie(kb, b.first, b.second);
    });
    return out;
  }

  void extend(Index t, std::span<const Index> pre, std::size_t i, std::vector<std::size_t>& chosen,
              std::vector<Extension>& out) const {
    if (i == pre.size()) {
      if (!known_.count({t, chosen})) out.emplace_back(t, chosen);
      return;
    }
    for (auto b : by_place_[pre[i]]) {
      bool ok = true;
      for (auto c : chosen)
        if (!co_[c].count(b)) ok = false;
      if (!ok) continue;
      chosen.push_back(b);
      extend(t, pre, i + 1, chosen, out);
      chosen.pop_back();
    }
  }

  void add_event(Index t, const std::vector<std::size_t>& preset) {
    std::size_t e = bp_.events.size();
    known_.insert({t, preset});
    bp_.events.push_back({t, preset, {}});
    for (auto b : preset) bp_.conditions[b].post.push_back(e);

    // Conditions concurrent with every input condition, minus the inputs.
    std::set<std::size_t> shared = co_[preset.front()];
    for (std::size_t k = 1; k < preset.size(); ++k) {
      std::set<std::size_t> next;
      std::set_intersection(shared.begin(), shared.end(), co_[preset[k]].begin(), co_[preset[k]].end(),
                            std::inserter(next, next.end()));
      shared = std::move(next);
    }
    for (auto b : preset) shared.erase(b);

    std::vector<std::size_t> fresh;
    for (Index p : net_.transition_postset(t)) fresh.push_back(new_condition(p, e));
    bp_.events[e].postset = fresh;
    for (auto b : fresh) {
      co_[b] = shared;
      for (auto c : fresh)
        if (c != b) co_[b].insert(c);
      for (auto c : shared) {
        co_[c].insert(b);
        if (bp_.conditions[c].place == bp_.conditions[b].place)
          throw UnsafeNet("two concurrent tokens on " + net_.place_name(bp_.conditions[b].place) + " after " +
                          net_.transition_name(t));
      }
    }
  }

  const PetriNet& net_;
  BranchingProcess bp_;
  std::vector<std::set<std::size_t>> co_;
  std::vector<std::vector<std::size_t>> by_place_;
  std::set<Extension> known_;
};

}  // namespace detail

/// Unfolding by possible extensions, at most `depth` events. Extensions are
/// added in rounds; within a round they are ordered by their newest input
/// condition, then transition, then preset. Acyclic nets unfold completely
/// whenever `depth` is large enough; `partial` reports a cut-off.
inline BranchingProcess unfold(const PetriNet& net, std::size_t depth = 10000) {
  detail::Unfolder u(net);
  return u.run(depth);
}

/// Violations of the occurrence-net and branching-process conditions
/// (clauses occ.1-occ.4, bp.1-bp.4). Empty for every process built by unfold.
inline std::vector<Violation> branching_process_violations(const BranchingProcess& bp) {
  std::vector<Violation> out;
  PetriNet occ = bp.occurrence_net();
  for (Index b = 0; b < occ.place_count(); ++b)
    if (occ.place_preset(b).size() > 1) out.push_back({"occ.1", {occ.place_name(b)}, "condition with several producers"});
  if (!is_acyclic(occ)) out.push_back({"occ.2", {}, "flow relation has a cycle"});
  // occ.3 (finite past) holds for every finite net.
  for (auto x : occ.nodes())
    if (conflict(occ, x, x)) out.push_back({"occ.4", {occ.name_of(x)}, "node in self-conflict"});
  for (Index b = 0; b < occ.place_count(); ++b)
    if (occ.place_preset(b).empty() && !occ.initial()[b])
      out.push_back({"occ.min", {occ.place_name(b)}, "minimal condition is not marked"});

  // bp.1 holds by the types of Condition/Event.
  std::multiset<Index> min_images;
  for (const auto& c : bp.conditions)
    if (!c.pre) min_images.insert(c.place);
  auto support = bp.source.initial().support();
  std::multiset<Index> m0(support.begin(), support.end());
  if (min_images != m0) out.push_back({"bp.2", {}, "minimal conditions do not fold bijectively onto m0"});
  std::set<std::pair<Index, std::vector<std::size_t>>> seen;
  for (std::size_t j = 0; j < bp.events.size(); ++j) {
    const auto& e = bp.events[j];
    std::multiset<Index> pre, post;
    for (auto b : e.preset) pre.insert(bp.conditions[b].place);
    for (auto b : e.postset) post.insert(bp.conditions[b].place);
    auto tp = bp.source.transition_preset(e.transition);
    auto tq = bp.source.transition_postset(e.transition);
    if (pre != std::multiset<Index>(tp.begin(), tp.end()) || post != std::multiset<Index>(tq.begin(), tq.end()))
      out.push_back({"bp.3", {BranchingProcess::event_name(j)}, "event neighbourhood does not fold bijectively"});
    auto key = std::make_pair(e.transition, e.preset);
    std::sort(key.second.begin(), key.second.end());
    if (!seen.insert(key).second) out.push_back({"bp.4", {BranchingProcess::event_name(j)}, "duplicate event"});
  }
  return out;
}

}  // namespace wfnet
