#pragma once

// Random nets for property tests: unconstrained GWF-nets, block-structured
// sound nets, choreography projections for interface pairs, and refinement
// moves that come with their abstraction map.

#include <algorithm>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "support/net_spec.hpp"

namespace wfgen {

using Rng = std::mt19937;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class C>
const typename C::value_type& pick(Rng& rng, const C& c) {
  auto it = c.begin();
  std::advance(it, uniform(rng, 0, static_cast<int>(c.size()) - 1));
  return *it;
}

inline bool builds(const NetSpec& s) {
  try {
    s.build();
    return true;
  } catch (const wfnet::Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Unconstrained GWF-nets

/// A random GWF-net with at most `max_nodes` nodes. Places are ordered; each
/// transition mostly consumes from earlier places and produces into later
/// ones, with occasional backward arcs (loops) and extra inputs (joins), so
/// deadlocks, unboundedness and dead transitions all occur. Soundness is not
/// controlled.
inline NetSpec random_gwf(Rng& rng, int max_nodes = 12, const std::string& prefix = "") {
  // Sizes are drawn first and kept for a number of retries; otherwise the
  // small nets, which pass the path condition more often, would dominate.
  int np = 0, nt = 0;
  for (int attempt = 0;; ++attempt) {
    if (attempt % 200 == 0) {
      np = uniform(rng, 2, std::min(7, max_nodes - 1));
      nt = uniform(rng, std::max(1, np - 2), std::max(1, std::min(np + 2, max_nodes - np)));
    }
    NetSpec s;
    s.name = prefix.empty() ? "random" : prefix + "net";
    std::vector<std::string> ps, ts;
    for (int i = 0; i < np; ++i) ps.push_back(prefix + "p" + std::to_string(i));
    for (int i = 0; i < nt; ++i) ts.push_back(prefix + "t" + std::to_string(i));
    s.places.insert(ps.begin(), ps.end());
    s.transitions.insert(ts.begin(), ts.end());
    s.m0.insert(ps.front());
    s.mf.insert(ps.back());
    if (np >= 4 && coin(rng, 0.2)) s.m0.insert(ps[1]);
    if (np >= 4 && coin(rng, 0.2)) s.mf.insert(ps[np - 2]);
    auto is_source = [&](int i) { return !s.mf.count(ps[i]); };
    auto is_sink = [&](int i) { return !s.m0.count(ps[i]); };
    auto any = [&](auto ok) {
      std::vector<int> c;
      for (int i = 0; i < np; ++i)
        if (ok(i)) c.push_back(i);
      return c;
    };
    for (const auto& t : ts) {
      auto from = pick(rng, any(is_source));
      auto later = any([&](int i) { return i > from && is_sink(i); });
      // Forward arcs favour near successors, which gives longer runs.
      int to = (later.empty() || coin(rng, 0.15)) ? pick(rng, any(is_sink)) : std::min(pick(rng, later), pick(rng, later));
      std::set<int> in{from}, out{to};
      if (coin(rng, 0.25)) in.insert(pick(rng, any(is_source)));
      if (coin(rng, 0.25)) out.insert(pick(rng, any(is_sink)));
      for (int i : in) s.arc(ps[i], t);
      for (int o : out)
        if (!in.count(o)) s.arc(t, ps[o]);
    }
    // Backbone: every place is consumed and produced by some transition, so
    // most draws satisfy the path condition.
    for (int i = 0; i < np; ++i) {
      if (is_source(i) && s.post(ps[i]).empty()) s.arc(ps[i], pick(rng, ts));
      if (is_sink(i) && s.pre(ps[i]).empty()) {
        const auto& t = pick(rng, ts);
        if (!s.pre(t).count(ps[i])) s.arc(t, ps[i]);
      }
    }
    if (builds(s)) return s;
  }
}

/// Attaches random labels so that `left` only sends on `out_channels` and
/// receives on `in_channels`; sync labels are drawn from `sync`.
inline void random_labels(Rng& rng, NetSpec& s, const std::vector<std::string>& out_channels,
                          const std::vector<std::string>& in_channels, const std::vector<std::string>& sync) {
  for (const auto& t : s.transitions) {
    int r = uniform(rng, 0, 9);
    if (r < 2 && !out_channels.empty()) s.labels.async[t] = {pick(rng, out_channels), Direction::send};
    else if (r < 4 && !in_channels.empty()) s.labels.async[t] = {pick(rng, in_channels), Direction::receive};
    else if (r < 6 && !sync.empty()) s.labels.sync[t] = pick(rng, sync);
  }
}

// ---------------------------------------------------------------------------
// Block-structured sound nets

/// Grows i -> t -> f by soundness-preserving moves: sequence (split a place
/// or a transition), choice (duplicate a transition), parallel (duplicate a
/// place) and loop (detour on an inner place).
inline NetSpec random_sound_net(Rng& rng, int moves, const std::string& prefix = "", bool loops = true) {
  NetSpec s;
  s.name = prefix.empty() ? "block" : prefix + "block";
  int next = 0;
  auto fresh = [&](char k) { return prefix + k + std::to_string(next++); };
  std::string i = fresh('p'), f = fresh('p'), t = fresh('t');
  s.places = {i, f};
  s.m0 = {i};
  s.mf = {f};
  add_transition(s, t, {i}, {f});
  for (int k = 0; k < moves; ++k) {
    switch (uniform(rng, 0, loops ? 4 : 3)) {
      case 0: {  // t -> t; q; t'
        std::string t1 = pick(rng, s.transitions), q = fresh('p'), t2 = fresh('t');
        auto out = s.post(t1);
        for (const auto& p : out) s.arcs.erase({t1, p});
        s.places.insert(q);
        s.arc(t1, q);
        add_transition(s, t2, {q}, {out.begin(), out.end()});
        break;
      }
      case 1: {  // p -> p; t'; p'
        std::string p = pick(rng, s.places), t2 = fresh('t'), q = fresh('p');
        auto out = s.post(p);
        for (const auto& x : out) s.arcs.erase({p, x});
        s.places.insert(q);
        for (const auto& x : out) s.arc(q, x);
        add_transition(s, t2, {p}, {q});
        if (s.mf.erase(p)) s.mf.insert(q);
        break;
      }
      case 2: {  // alternative copy of a transition
        std::string t1 = pick(rng, s.transitions), t2 = fresh('t');
        auto in = s.pre(t1), out = s.post(t1);
        add_transition(s, t2, {in.begin(), in.end()}, {out.begin(), out.end()});
        break;
      }
      case 3: {  // parallel copy of an inner place
        std::vector<std::string> inner;
        for (const auto& p : s.places)
          if (!s.m0.count(p) && !s.mf.count(p)) inner.push_back(p);
        if (inner.empty()) break;
        std::string p = pick(rng, inner), q = fresh('p');
        s.places.insert(q);
        for (const auto& x : s.pre(p)) s.arc(x, q);
        for (const auto& x : s.post(p)) s.arc(q, x);
        break;
      }
      case 4: {  // detour p -> l1 -> q -> l2 -> p
        std::vector<std::string> inner;
        for (const auto& p : s.places)
          if (!s.m0.count(p) && !s.mf.count(p)) inner.push_back(p);
        if (inner.empty()) break;
        std::string p = pick(rng, inner), q = fresh('p'), l1 = fresh('t'), l2 = fresh('t');
        s.places.insert(q);
        add_transition(s, l1, {p}, {q});
        add_transition(s, l2, {q}, {p});
        break;
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Refinement moves

/// A refined net together with its abstraction map (node name -> node name).
struct Refinement {
  NetSpec net;
  std::map<std::string, std::string> phi;
};

/// Applies `moves` refinement moves to a copy of `abstract`; new nodes are
/// named `prefix` followed by a counter. Every move
/// replaces a place by an acyclic block mapped onto the original place's
/// image (chain, fork/join, choice), or splits the outputs of a place so each
/// consuming transition gets one copy per branch. Labels are copied with the
/// transitions they belong to; new transitions are unlabeled.
inline Refinement refine(Rng& rng, const NetSpec& abstract, int moves, const std::string& prefix = "r") {
  Refinement r{abstract, {}};
  r.net.name = abstract.name + "_r";
  for (const auto& p : abstract.places) r.phi[p] = p;
  for (const auto& t : abstract.transitions) r.phi[t] = t;
  NetSpec& s = r.net;
  int next = 0;
  auto fresh = [&](const std::string& img, bool place) {
    std::string n = prefix + std::to_string(next++);
    (place ? s.places : s.transitions).insert(n);
    r.phi[n] = img;
    return n;
  };
  auto detach_outputs = [&](const std::string& p, const std::string& to) {
    for (const auto& t : s.post(p)) {
      s.arcs.erase({p, t});
      s.arc(to, t);
    }
    if (s.mf.erase(p)) s.mf.insert(to);
  };

  for (int k = 0; k < moves; ++k) {
    std::vector<std::string> candidates;
    for (const auto& p : s.places)
      if (!s.labels.channel.count(p)) candidates.push_back(p);
    std::string p = pick(rng, candidates);
    const std::string img = r.phi.at(p);
    switch (uniform(rng, 0, 3)) {
      case 0: {  // chain
        std::string u = fresh(img, false), q = fresh(img, true);
        detach_outputs(p, q);
        add_transition(s, u, {p}, {q});
        break;
      }
      case 1: {  // fork / join
        std::string u = fresh(img, false), a = fresh(img, true), b = fresh(img, true), v = fresh(img, false),
                    q = fresh(img, true);
        detach_outputs(p, q);
        add_transition(s, u, {p}, {a, b});
        add_transition(s, v, {a, b}, {q});
        break;
      }
      case 2: {  // choice
        std::string u1 = fresh(img, false), u2 = fresh(img, false), q = fresh(img, true);
        detach_outputs(p, q);
        add_transition(s, u1, {p}, {q});
        add_transition(s, u2, {p}, {q});
        break;
      }
      case 3: {  // split the consumers of p over two branches
        auto consumers = s.post(p);
        if (consumers.empty()) {
          --k;
          continue;
        }
        std::string u1 = fresh(img, false), u2 = fresh(img, false), a1 = fresh(img, true), a2 = fresh(img, true);
        add_transition(s, u1, {p}, {a1});
        add_transition(s, u2, {p}, {a2});
        for (const auto& t : consumers) {
          auto in = s.pre(t), out = s.post(t);
          auto h = s.labels.async.find(t);
          auto l = s.labels.sync.find(t);
          std::optional<AsyncLabel> async;
          std::optional<std::string> sync;
          if (h != s.labels.async.end()) async = h->second;
          if (l != s.labels.sync.end()) sync = l->second;
          std::string timg = r.phi.at(t);
          s.remove_transition(t);
          r.phi.erase(t);
          int branch = 1;
          for (const auto& a : {a1, a2}) {
            std::string copy = t + "_" + std::to_string(branch++);
            r.phi[copy] = timg;
            std::vector<std::string> cin{a};
            for (const auto& x : in)
              if (x != p) cin.push_back(x);
            add_transition(s, copy, cin, {out.begin(), out.end()});
            if (async) s.labels.async[copy] = *async;
            if (sync) s.labels.sync[copy] = *sync;
          }
        }
        // u1/u2 are the only consumers of p now; the arcs p -> t went with t.
        break;
      }
    }
  }
  return r;
}

inline wfnet::Morphism morphism_of(const Refinement& r, const wfnet::LgwfNet& refined, const wfnet::LgwfNet& abs) {
  return wfnet::Morphism::from_names(refined.net(), abs.net(), r.phi);
}

// ---------------------------------------------------------------------------
// Choreographies

/// Two components projected from a random global protocol. Every message
/// uses a fresh channel with one sender and one receiver; every joint step
/// uses a fresh sync label; choices are announced by the choosing side's
/// first message, or taken jointly through alternative sync labels. The
/// composition is sound by construction and both components are state
/// machines.
struct Choreography {
  NetSpec left, right;
};

class ChoreographyBuilder {
 public:
  ChoreographyBuilder(Rng& rng, std::string tag) : rng_(rng), tag_(std::move(tag)) {
    side_[0].name = "a" + tag_;
    side_[1].name = "b" + tag_;
  }

  Choreography run(int actions) {
    std::string cur[2] = {place(0), place(1)};
    side_[0].m0 = {cur[0]};
    side_[1].m0 = {cur[1]};
    // The opening action involves both sides, so neither is empty.
    if (coin(rng_)) message(uniform(rng_, 0, 1), cur);
    else joint(cur);
    block(actions - 1, cur);
    side_[0].mf = {cur[0]};
    side_[1].mf = {cur[1]};
    return {side_[0], side_[1]};
  }

 private:
  std::string prefix(int s) const { return std::string(s == 0 ? "a" : "b") + tag_ + "."; }
  std::string place(int s) {
    std::string p = prefix(s) + "p" + std::to_string(next_[s]++);
    side_[s].places.insert(p);
    return p;
  }
  std::string step(int s, const std::string& from, const std::string& to) {
    std::string t = prefix(s) + "t" + std::to_string(next_[s]++);
    add_transition(side_[s], t, {from}, {to});
    return t;
  }
  void message(int from, std::string cur[2]) {
    std::string c = "c" + tag_ + "_" + std::to_string(channels_++);
    for (int s : {0, 1}) {
      std::string to = place(s);
      auto t = step(s, cur[s], to);
      side_[s].labels.async[t] = {c, s == from ? Direction::send : Direction::receive};
      cur[s] = to;
    }
  }
  void joint(std::string cur[2]) {
    std::string l = "s" + tag_ + "_" + std::to_string(syncs_++);
    for (int s : {0, 1}) {
      std::string to = place(s);
      side_[s].labels.sync[step(s, cur[s], to)] = l;
      cur[s] = to;
    }
  }
  void local(int s, std::string cur[2]) {
    std::string to = place(s);
    step(s, cur[s], to);
    cur[s] = to;
  }
  void block(int budget, std::string cur[2]) {
    while (budget > 0) {
      int kind = uniform(rng_, 0, budget >= 3 ? 5 : 4);
      --budget;
      switch (kind) {
        case 0:
        case 1: message(kind, cur); break;
        case 2: joint(cur); break;
        case 3:
        case 4: local(kind - 3, cur); break;
        case 5: {
          int inner = uniform(rng_, 0, std::min(budget, 2));
          budget -= inner;
          choice(inner, cur);
          break;
        }
      }
    }
  }
  void choice(int budget, std::string cur[2]) {
    bool announced = coin(rng_);
    int chooser = uniform(rng_, 0, 1);
    std::string merge[2] = {place(0), place(1)};
    for (int branch = 0; branch < 2; ++branch) {
      std::string b[2] = {cur[0], cur[1]};
      if (announced) message(chooser, b);
      else joint(b);
      block(branch == 0 ? budget : uniform(rng_, 0, budget), b);
      for (int s : {0, 1}) step(s, b[s], merge[s]);
    }
    cur[0] = merge[0];
    cur[1] = merge[1];
  }

  Rng& rng_;
  std::string tag_;
  NetSpec side_[2];
  int next_[2] = {0, 0};
  int channels_ = 0, syncs_ = 0;
};

inline Choreography random_choreography(Rng& rng, int actions, const std::string& tag = "") {
  return ChoreographyBuilder(rng, tag).run(actions);
}

// ---------------------------------------------------------------------------
// Refinement scenarios

/// A choreography interface with both components refined by random moves.
inline wfnet::RefinementScenario random_scenario(Rng& rng, const std::string& name, int actions, int moves) {
  auto ch = random_choreography(rng, actions);
  auto left = refine(rng, ch.left, uniform(rng, 1, moves), "a.r");
  auto right = refine(rng, ch.right, uniform(rng, 1, moves), "b.r");
  auto n1 = ch.left.build(), n2 = ch.right.build();
  auto r1 = left.net.build(), r2 = right.net.build();
  auto phi1 = morphism_of(left, r1, n1);
  auto phi2 = morphism_of(right, r2, n2);
  return {name, std::move(r1), std::move(r2), std::move(n1), std::move(n2), std::move(phi1), std::move(phi2)};
}

}  // namespace wfgen
