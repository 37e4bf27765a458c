#pragma once

// Name-independent isomorphism of labeled nets: colour refinement followed by
// backtracking. Exact; exponential in the worst case.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "wfnet/labeled.hpp"

namespace wfnet {

namespace detail {

struct IsoGraph {
  std::vector<std::string> names;
  std::vector<std::string> attrs;
  std::vector<std::vector<std::size_t>> out, in;
  std::vector<std::vector<bool>> adj;
};

inline IsoGraph iso_graph(const LgwfNet& n) {
  const PetriNet& net = n.net();
  IsoGraph g;
  std::size_t np = net.place_count();
  auto id = [&](NodeRef x) { return x.is_place() ? x.index : np + x.index; };
  for (auto x : net.nodes()) {
    g.names.push_back(net.name_of(x));
    std::string a;
    if (x.is_place()) {
      a = "P|" + std::to_string(net.initial()[x.index]) + "|" + std::to_string(n.final_marking()[x.index]) + "|";
      if (auto c = n.channel(x.index)) a += *c;
    } else {
      a = "T|";
      if (auto h = n.async_label(x.index)) a += h->str();
      a += "|";
      if (auto s = n.sync_label(x.index)) a += *s;
    }
    g.attrs.push_back(a);
  }
  std::size_t total = net.node_count();
  g.out.assign(total, {});
  g.in.assign(total, {});
  g.adj.assign(total, std::vector<bool>(total, false));
  for (auto x : net.nodes())
    for (auto y : net.postset(x)) {
      g.out[id(x)].push_back(id(y));
      g.in[id(y)].push_back(id(x));
      g.adj[id(x)][id(y)] = true;
    }
  return g;
}

/// Joint colour refinement on both graphs so colours are comparable.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> refine_colours(const IsoGraph& a,
                                                                                  const IsoGraph& b) {
  std::map<std::string, std::size_t> initial;
  for (const auto* g : {&a, &b})
    for (const auto& s : g->attrs) initial.emplace(s, 0);
  std::size_t k = 0;
  for (auto& [s, c] : initial) c = k++;
  std::vector<std::size_t> ca, cb;
  for (const auto& s : a.attrs) ca.push_back(initial[s]);
  for (const auto& s : b.attrs) cb.push_back(initial[s]);

  using Sig = std::tuple<std::size_t, std::vector<std::size_t>, std::vector<std::size_t>>;
  auto signature = [](const IsoGraph& g, const std::vector<std::size_t>& c, std::size_t v) {
    std::vector<std::size_t> o, i;
    for (auto w : g.out[v]) o.push_back(c[w]);
    for (auto w : g.in[v]) i.push_back(c[w]);
    std::sort(o.begin(), o.end());
    std::sort(i.begin(), i.end());
    return Sig{c[v], o, i};
  };
  std::size_t classes = initial.size();
  while (true) {
    std::map<Sig, std::size_t> ids;
    std::vector<Sig> sa, sb;
    for (std::size_t v = 0; v < ca.size(); ++v) sa.push_back(signature(a, ca, v));
    for (std::size_t v = 0; v < cb.size(); ++v) sb.push_back(signature(b, cb, v));
    for (const auto& s : sa) ids.emplace(s, 0);
    for (const auto& s : sb) ids.emplace(s, 0);
    std::size_t next = 0;
    for (auto& [s, c] : ids) c = next++;
    for (std::size_t v = 0; v < ca.size(); ++v) ca[v] = ids[sa[v]];
    for (std::size_t v = 0; v < cb.size(); ++v) cb[v] = ids[sb[v]];
    if (ids.size() == classes) break;
    classes = ids.size();
  }
  return {ca, cb};
}

}  // namespace detail

/// A bijection between node names of `a` and `b` preserving kinds, arcs,
/// markings and all labels, or nullopt.
inline std::optional<std::map<std::string, std::string>> find_isomorphism(const LgwfNet& a, const LgwfNet& b) {
  if (a.net().place_count() != b.net().place_count() || a.net().transition_count() != b.net().transition_count())
    return std::nullopt;
  auto ga = detail::iso_graph(a);
  auto gb = detail::iso_graph(b);
  auto [ca, cb] = detail::refine_colours(ga, gb);
  {
    auto sa = ca, sb = cb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
  }
  std::size_t n = ca.size();
  // Most constrained (smallest colour class) first.
  std::map<std::size_t, std::size_t> class_size;
  for (auto c : ca) ++class_size[c];
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return class_size[ca[x]] < class_size[ca[y]]; });

  std::vector<std::size_t> to(n, n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> search = [&](std::size_t k) {
    if (k == n) return true;
    std::size_t v = order[k];
    for (std::size_t w = 0; w < n; ++w) {
      if (used[w] || cb[w] != ca[v]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        std::size_t u = order[j];
        if (ga.adj[v][u] != gb.adj[w][to[u]] || ga.adj[u][v] != gb.adj[to[u]][w]) ok = false;
      }
      if (!ok) continue;
      to[v] = w;
      used[w] = true;
      if (search(k + 1)) return true;
      used[w] = false;
    }
    to[v] = n;
    return false;
  };
  if (!search(0)) return std::nullopt;
  std::map<std::string, std::string> out;
  for (std::size_t v = 0; v < n; ++v) out.emplace(ga.names[v], gb.names[to[v]]);
  return out;
}

inline bool isomorphic(const LgwfNet& a, const LgwfNet& b) { return find_isomorphism(a, b).has_value(); }

}  // namespace wfnet
