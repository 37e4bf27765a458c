#pragma once

// Human-readable and JSON renderings of reports and certificates.

#include <string>

#include <nlohmann/json.hpp>

#include "wfnet/refine.hpp"

namespace wfnet {

/// "fire t1 t2 ..." followed by "marking {...}"; replayable as printed.
inline std::string format_witness(const PetriNet& net, const Witness& w) {
  std::string s = "fire";
  for (const auto& t : w.firing) s += " " + t;
  s += "\nmarking " + net.format(w.marking) + "\n";
  if (w.covered) s += "covers " + net.format(*w.covered) + "\n";
  return s;
}

inline std::string format_soundness(const PetriNet& net, const SoundnessReport& r) {
  std::string s;
  if (r.sound) return "sound: " + r.summary + "\n";
  s = "unsound: clause " + std::to_string(r.violated_clause.value_or(0)) + ": " + r.summary + "\n";
  if (r.witness) s += format_witness(net, *r.witness);
  return s;
}

inline std::string format_morphism_report(const MorphismReport& r) {
  if (r.valid) return "valid\n";
  std::string s = "invalid\n";
  for (const auto& v : r.failures) s += "  " + describe(v) + "\n";
  return s;
}

inline std::string format_certificate(const Certificate& c) {
  std::string s = "scenario " + c.scenario + "\n";
  for (const auto& p : c.premises) s += std::string(p.holds ? "  ok    " : "  FAIL  ") + p.name + ": " + p.detail + "\n";
  s += c.conclusion + "\n";
  if (c.audit) s += "audit: " + std::string(c.audit->sound ? "sound" : "unsound") + " (" + c.audit->summary + ")\n";
  return s;
}

inline nlohmann::json to_json(const SoundnessReport& r) {
  nlohmann::json j{{"sound", r.sound}, {"states", r.states}, {"summary", r.summary}};
  if (r.violated_clause) j["violated_clause"] = *r.violated_clause;
  if (!r.dead_transitions.empty()) j["dead_transitions"] = r.dead_transitions;
  if (r.witness) j["witness"] = {{"fire", r.witness->firing}};
  return j;
}

inline nlohmann::json to_json(const MorphismReport& r) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& v : r.failures) failures.push_back({{"clause", v.clause}, {"nodes", v.nodes}, {"detail", v.detail}});
  return {{"valid", r.valid}, {"failures", failures}};
}

inline nlohmann::json to_json(const Certificate& c) {
  nlohmann::json premises = nlohmann::json::array();
  for (const auto& p : c.premises) premises.push_back({{"name", p.name}, {"holds", p.holds}, {"detail", p.detail}});
  nlohmann::json j{{"scenario", c.scenario},
                   {"certified", c.certified},
                   {"premises", premises},
                   {"failed_premises", c.failed_premises()},
                   {"conclusion", c.conclusion}};
  for (const auto& [k, r] : c.soundness) j["soundness"][k] = to_json(r);
  for (const auto& [k, r] : c.morphisms) j["morphisms"][k] = to_json(r);
  for (const auto& [k, lc] : c.local_conditions) {
    nlohmann::json places = nlohmann::json::array();
    for (const auto& p : lc.places)
      places.push_back({{"place", p.place}, {"holds", p.holds}, {"never_enabled", p.never_enabled}, {"events", p.events}});
    j["local_conditions"][k] = {{"holds", lc.holds}, {"places", places}};
  }
  if (c.audit) j["audit"] = to_json(*c.audit);
  return j;
}

}  // namespace wfnet
