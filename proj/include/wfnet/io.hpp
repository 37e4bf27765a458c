#pragma once

// Line-oriented text formats for nets, morphisms and manifests.
//
//   # wfnet v1
//   net <name>
//   place <id> [init] [final] [chan=<c>]
//   trans <id> [async=<c>!|async=<c>?] [sync=<s>]
//   arc <src> <dst>
//
//   # wfnet v1
//   morphism <src-net> -> <dst-net>
//   map <src-node> <dst-node>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wfnet/labeled.hpp"
#include "wfnet/morphism.hpp"
#include "wfnet/refine.hpp"

namespace wfnet {

inline constexpr std::string_view format_header = "# wfnet v1";

struct PlaceDecl {
  std::string name;
  bool init = false;
  bool final = false;
  std::optional<std::string> channel;
};

struct TransitionDecl {
  std::string name;
  std::optional<AsyncLabel> async;
  std::optional<std::string> sync;
};

/// A net file as declared, before any validation beyond syntax.
struct NetDocument {
  std::string name;
  std::vector<PlaceDecl> places;
  std::vector<TransitionDecl> transitions;
  std::vector<std::pair<std::string, std::string>> arcs;
};

namespace detail {

struct Line {
  std::size_t number;
  std::vector<std::string> words;
};

/// Splits into non-comment lines of whitespace-separated words after
/// checking the version header.
inline std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      if (line != format_header) throw ParseError(1, "expected header '" + std::string(format_header) + "'");
      header = true;
      continue;
    }
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream words(line);
    Line l{number, {}};
    for (std::string w; words >> w;) l.words.push_back(w);
    out.push_back(std::move(l));
  }
  if (!header) throw ParseError(1, "empty document");
  return out;
}

inline bool reserved_name(const std::string& s) { return s.rfind("⊥", 0) == 0; }

inline void check_id(const Line& l, const std::string& id) {
  if (reserved_name(id)) throw ParseError(l.number, "reserved name: " + id);
}

}  // namespace detail

inline NetDocument parse_net_document(std::string_view text) {
  NetDocument doc;
  bool named = false;
  for (const auto& l : detail::lines_of(text)) {
    const auto& w = l.words;
    const std::string& kw = w[0];
    if (kw == "net") {
      if (w.size() != 2) throw ParseError(l.number, "usage: net <name>");
      if (named) throw ParseError(l.number, "duplicate net declaration");
      doc.name = w[1];
      named = true;
    } else if (kw == "place") {
      if (w.size() < 2) throw ParseError(l.number, "usage: place <id> [init] [final] [chan=<c>]");
      detail::check_id(l, w[1]);
      PlaceDecl p{w[1], false, false, std::nullopt};
      for (std::size_t i = 2; i < w.size(); ++i) {
        if (w[i] == "init" && !p.init) p.init = true;
        else if (w[i] == "final" && !p.final) p.final = true;
        else if (w[i].rfind("chan=", 0) == 0 && !p.channel && w[i].size() > 5) p.channel = w[i].substr(5);
        else throw ParseError(l.number, "unexpected attribute '" + w[i] + "'");
      }
      doc.places.push_back(std::move(p));
    } else if (kw == "trans") {
      if (w.size() < 2) throw ParseError(l.number, "usage: trans <id> [async=<c>!|<c>?] [sync=<s>]");
      detail::check_id(l, w[1]);
      TransitionDecl t{w[1], std::nullopt, std::nullopt};
      for (std::size_t i = 2; i < w.size(); ++i) {
        if (w[i].rfind("async=", 0) == 0 && !t.async) {
          t.async = AsyncLabel::parse(w[i].substr(6));
          if (!t.async) throw ParseError(l.number, "bad async label '" + w[i].substr(6) + "'");
        } else if (w[i].rfind("sync=", 0) == 0 && !t.sync && w[i].size() > 5) {
          t.sync = w[i].substr(5);
        } else {
          throw ParseError(l.number, "unexpected attribute '" + w[i] + "'");
        }
      }
      doc.transitions.push_back(std::move(t));
    } else if (kw == "arc") {
      if (w.size() != 3) throw ParseError(l.number, "usage: arc <src> <dst>");
      doc.arcs.emplace_back(w[1], w[2]);
    } else {
      throw ParseError(l.number, "unknown declaration '" + kw + "'");
    }
  }
  if (!named) throw ParseError(1, "missing net declaration");
  return doc;
}

/// Builds and validates the labeled net a document declares. Structural and
/// labeling problems raise StructuralViolation / LabelViolation.
inline LgwfNet build_net(const NetDocument& doc) {
  std::vector<std::string> places, transitions;
  std::map<std::string, std::uint32_t> m0;
  std::set<std::string> mf;
  Labels labels;
  for (const auto& p : doc.places) {
    places.push_back(p.name);
    if (p.init) m0[p.name] = 1;
    if (p.final) mf.insert(p.name);
    if (p.channel) labels.channel[p.name] = *p.channel;
  }
  for (const auto& t : doc.transitions) {
    transitions.push_back(t.name);
    if (t.async) labels.async[t.name] = *t.async;
    if (t.sync) labels.sync[t.name] = *t.sync;
  }
  PetriNet net(doc.name, places, transitions, doc.arcs, m0);
  return validate_lgwf(check_gwf(std::move(net), mf), labels);
}

inline LgwfNet parse_net(std::string_view text) { return build_net(parse_net_document(text)); }

/// Canonical text: places, transitions and arcs each in lexicographic order.
inline std::string serialize_net(const LgwfNet& n) {
  const PetriNet& net = n.net();
  std::string s(format_header);
  s += "\nnet " + net.name() + "\n";
  for (Index p = 0; p < net.place_count(); ++p) {
    s += "place " + net.place_name(p);
    if (net.initial()[p]) s += " init";
    if (n.final_marking()[p]) s += " final";
    if (auto c = n.channel(p)) s += " chan=" + *c;
    s += "\n";
  }
  for (Index t = 0; t < net.transition_count(); ++t) {
    s += "trans " + net.transition_name(t);
    if (auto h = n.async_label(t)) s += " async=" + h->str();
    if (auto l = n.sync_label(t)) s += " sync=" + *l;
    s += "\n";
  }
  for (const auto& [a, b] : net.arcs()) s += "arc " + a + " " + b + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Morphisms

struct MorphismDocument {
  std::string source;
  std::string target;
  std::vector<std::pair<std::string, std::string>> map;
};

inline MorphismDocument parse_morphism_document(std::string_view text) {
  MorphismDocument doc;
  bool header = false;
  std::set<std::string> seen;
  for (const auto& l : detail::lines_of(text)) {
    const auto& w = l.words;
    if (w[0] == "morphism") {
      if (w.size() != 4 || w[2] != "->") throw ParseError(l.number, "usage: morphism <src> -> <dst>");
      if (header) throw ParseError(l.number, "duplicate morphism declaration");
      doc.source = w[1];
      doc.target = w[3];
      header = true;
    } else if (w[0] == "map") {
      if (w.size() != 3) throw ParseError(l.number, "usage: map <src-node> <dst-node>");
      if (!seen.insert(w[1]).second) throw ParseError(l.number, "node mapped twice: " + w[1]);
      doc.map.emplace_back(w[1], w[2]);
    } else {
      throw ParseError(l.number, "unknown declaration '" + w[0] + "'");
    }
  }
  if (!header) throw ParseError(1, "missing morphism declaration");
  return doc;
}

/// Resolves the document against concrete nets. Raises UnknownNode or NotTotal.
inline Morphism build_morphism(const MorphismDocument& doc, const PetriNet& source, const PetriNet& target) {
  if (doc.source != source.name()) throw MapMismatch("morphism source is " + doc.source + ", not " + source.name());
  if (doc.target != target.name()) throw MapMismatch("morphism target is " + doc.target + ", not " + target.name());
  std::map<std::string, std::string> m(doc.map.begin(), doc.map.end());
  return Morphism::from_names(source, target, m);
}

inline Morphism parse_morphism(std::string_view text, const PetriNet& source, const PetriNet& target) {
  return build_morphism(parse_morphism_document(text), source, target);
}

inline std::string serialize_morphism(const Morphism& phi) {
  std::string s(format_header);
  s += "\nmorphism " + phi.source().name() + " -> " + phi.target().name() + "\n";
  for (const auto& [a, b] : phi.to_names()) s += "map " + a + " " + b + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Files and manifests

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline LgwfNet load_net(const std::filesystem::path& path) { return parse_net(read_file(path)); }

/// Loads a morphism file; the nets are found next to it as <name>.wfnet.
struct LoadedMorphism {
  LgwfNet source;
  LgwfNet target;
  Morphism phi;
};

inline LoadedMorphism load_morphism(const std::filesystem::path& path) {
  auto doc = parse_morphism_document(read_file(path));
  auto dir = path.parent_path();
  auto src = load_net(dir / (doc.source + ".wfnet"));
  auto dst = load_net(dir / (doc.target + ".wfnet"));
  auto phi = build_morphism(doc, src.net(), dst.net());
  return {std::move(src), std::move(dst), std::move(phi)};
}

namespace detail {

inline std::map<std::string, std::string> manifest_entries(std::string_view text, const std::string& kind,
                                                           const std::set<std::string>& keys, std::string& name) {
  std::map<std::string, std::string> out;
  for (const auto& l : lines_of(text)) {
    const auto& w = l.words;
    if (w.size() != 2) throw ParseError(l.number, "expected '<key> <value>'");
    if (w[0] == kind) {
      name = w[1];
      continue;
    }
    if (!keys.count(w[0])) throw ParseError(l.number, "unknown key '" + w[0] + "'");
    if (!out.emplace(w[0], w[1]).second) throw ParseError(l.number, "duplicate key '" + w[0] + "'");
  }
  if (name.empty()) throw ParseError(1, "missing '" + kind + " <name>' line");
  for (const auto& k : keys)
    if (!out.count(k)) throw ParseError(1, "missing key '" + k + "'");
  return out;
}

}  // namespace detail

/// Scenario manifest:
///   scenario <name>
///   r1 <path>  r2 <path>  n1 <path>  n2 <path>  phi1 <path>  phi2 <path>
/// Paths are relative to the manifest. Morphism files name their nets, which
/// must match r_i and n_i.
inline RefinementScenario load_scenario(const std::filesystem::path& path) {
  std::string name;
  auto e = detail::manifest_entries(read_file(path), "scenario", {"r1", "r2", "n1", "n2", "phi1", "phi2"}, name);
  auto dir = path.parent_path();
  auto r1 = load_net(dir / e["r1"]);
  auto r2 = load_net(dir / e["r2"]);
  auto n1 = load_net(dir / e["n1"]);
  auto n2 = load_net(dir / e["n2"]);
  auto phi1 = build_morphism(parse_morphism_document(read_file(dir / e["phi1"])), r1.net(), n1.net());
  auto phi2 = build_morphism(parse_morphism_document(read_file(dir / e["phi2"])), r2.net(), n2.net());
  return {name, std::move(r1), std::move(r2), std::move(n1), std::move(n2), std::move(phi1), std::move(phi2)};
}

/// Intermediate refinement manifest:
///   refinement <name>
///   net <path>        the intermediate composition
///   interface <path>  the interface it refines
///   map <path>        morphism from net to interface
struct LoadedRefinement {
  std::string name;
  LgwfNet net;
  LgwfNet interface;
  Morphism phi;
};

inline LoadedRefinement load_refinement(const std::filesystem::path& path) {
  std::string name;
  auto e = detail::manifest_entries(read_file(path), "refinement", {"net", "interface", "map"}, name);
  auto dir = path.parent_path();
  auto net = load_net(dir / e["net"]);
  auto iface = load_net(dir / e["interface"]);
  auto phi = build_morphism(parse_morphism_document(read_file(dir / e["map"])), net.net(), iface.net());
  return {name, std::move(net), std::move(iface), std::move(phi)};
}

}  // namespace wfnet
