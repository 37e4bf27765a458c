#pragma once

// Mutable, name-keyed net description used by generators and oracles.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wfnet/wfnet.hpp"

namespace wfgen {

using wfnet::AsyncLabel;
using wfnet::Direction;

struct NetSpec {
  std::string name = "net";
  std::set<std::string> places, transitions;
  std::set<std::pair<std::string, std::string>> arcs;
  std::set<std::string> m0, mf;
  wfnet::Labels labels;

  std::set<std::string> pre(const std::string& x) const {
    std::set<std::string> out;
    for (const auto& [a, b] : arcs)
      if (b == x) out.insert(a);
    return out;
  }
  std::set<std::string> post(const std::string& x) const {
    std::set<std::string> out;
    for (const auto& [a, b] : arcs)
      if (a == x) out.insert(b);
    return out;
  }

  void arc(const std::string& a, const std::string& b) { arcs.emplace(a, b); }

  void remove_transition(const std::string& t) {
    transitions.erase(t);
    labels.async.erase(t);
    labels.sync.erase(t);
    for (auto it = arcs.begin(); it != arcs.end();)
      it = (it->first == t || it->second == t) ? arcs.erase(it) : std::next(it);
  }

  wfnet::PetriNet petri() const {
    std::map<std::string, std::uint32_t> init;
    for (const auto& p : m0) init[p] = 1;
    return wfnet::PetriNet(name, {places.begin(), places.end()}, {transitions.begin(), transitions.end()},
                           {arcs.begin(), arcs.end()}, init);
  }

  wfnet::LgwfNet build() const { return wfnet::validate_lgwf(wfnet::check_gwf(petri(), mf), labels); }
};

/// Adds transition t with the given preset and postset.
inline void add_transition(NetSpec& s, const std::string& t, const std::vector<std::string>& in,
                           const std::vector<std::string>& out) {
  s.transitions.insert(t);
  for (const auto& p : in) s.arc(p, t);
  for (const auto& p : out) s.arc(t, p);
}

}  // namespace wfgen
