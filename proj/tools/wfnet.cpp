// wfnet: command-line verifier for labeled workflow nets.
//
// Exit codes: 0 pass, 1 definite negative verdict, 2 usage or input error,
// 3 inconclusive (bounded exploration without a verdict).

#include <CLI11.hpp>
#include <iostream>

#include "wfnet/wfnet.hpp"
#include "wfnet/report.hpp"

namespace {

using namespace wfnet;

constexpr int kPass = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kInconclusive = 3;

struct Bounds {
  std::uint32_t cap = ExploreBounds{}.cap;
  std::size_t limit = ExploreBounds{}.limit;
  ExploreBounds get() const { return {cap, limit}; }
};

void add_bounds(CLI::App* cmd, Bounds& b) {
  cmd->add_option("--cap", b.cap, "tokens per place before a branch is cut")->check(CLI::PositiveNumber);
  cmd->add_option("--limit", b.limit, "maximum number of explored markings")->check(CLI::PositiveNumber);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) std::cout << text;
  else write_file(out, text);
}

bool is_morphism_document(const std::string& text) {
  try {
    parse_morphism_document(text);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

int cmd_validate(const std::string& path) {
  auto doc = parse_net_document(read_file(path));
  try {
    auto n = build_net(doc);
    std::cout << "valid: " << n.net().name() << " (" << n.net().place_count() << " places, "
              << n.net().transition_count() << " transitions)\n";
    return kPass;
  } catch (const ViolationError& e) {
    std::cout << "invalid\n";
    for (const auto& v : e.violations()) std::cout << "  " << describe(v) << "\n";
    return kNegative;
  }
}

int cmd_sound(const LgwfNet& n, ExploreBounds bounds) {
  try {
    auto r = check_soundness(n.gwf(), bounds);
    std::cout << format_soundness(n.net(), r);
    return r.sound ? kPass : kNegative;
  } catch (const IncompleteExploration& e) {
    std::cout << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  }
}

int cmd_smd(const LgwfNet& n) {
  const PetriNet& net = n.net();
  if (auto cover = find_sequential_cover(net)) {
    std::cout << "smd: " << cover->size() << " sequential components\n";
    for (const auto& c : *cover) {
      std::cout << "  component";
      for (Index p : c.places) std::cout << " " << net.place_name(p);
      std::cout << "\n";
    }
    return kPass;
  }
  std::cout << "not smd\n";
  for (Index p = 0; p < net.place_count(); ++p)
    if (!find_sequential_component(net, {p})) std::cout << "  uncovered " << net.place_name(p) << "\n";
  return kNegative;
}

int cmd_safe(const LgwfNet& n, ExploreBounds bounds) {
  const PetriNet& net = n.net();
  auto rg = explore(net, bounds);
  if (rg.unbounded_witness) {
    auto [a, b] = *rg.unbounded_witness;
    std::cout << "unsafe: unbounded\n";
    std::cout << format_witness(net, {rg.path_names(net, b), rg.vertices[b], rg.vertices[a]});
    return kNegative;
  }
  for (std::size_t v = 0; v < rg.vertices.size(); ++v)
    if (!rg.vertices[v].is_set()) {
      std::cout << "unsafe\n" << format_witness(net, {rg.path_names(net, v), rg.vertices[v], std::nullopt});
      return kNegative;
    }
  if (rg.truncated) {
    std::cout << "inconclusive: exploration truncated at " << rg.vertices.size() << " markings\n";
    return kInconclusive;
  }
  std::cout << "safe: " << rg.vertices.size() << " reachable markings\n";
  return kPass;
}

int cmd_compose(const std::string& a, const std::string& b, bool simplify, bool prefix, const std::string& out) {
  auto n1 = load_net(a);
  auto n2 = load_net(b);
  ComposeOptions opts;
  opts.auto_prefix = prefix;
  auto c = as_compose(n1, n2, opts);
  if (simplify) c = p_simplify(c);
  std::ostream& info = out.empty() ? std::cerr : std::cout;
  for (const auto& [from, to] : c.renamed) info << "renamed " << from << " -> " << to << "\n";
  info << "smd: " << (is_smd(c.result.net()) ? "yes" : "no") << "\n";
  emit(serialize_net(c.result), out);
  return kPass;
}

int cmd_check_morphism(const std::string& path, bool hat, bool local, bool well_marked, ExploreBounds bounds) {
  auto m = load_morphism(path);
  AlphaOptions opts{true, bounds};
  auto r = hat ? check_alpha_hat(m.phi, m.source, m.target, opts) : check_alpha(m.phi, opts);
  std::cout << (hat ? "alpha-hat: " : "alpha: ") << format_morphism_report(r);
  bool ok = r.valid;
  if (!r.valid && (local || well_marked)) {
    std::cout << "local/well-marked checks skipped: morphism invalid\n";
    return kNegative;
  }
  if (well_marked) {
    bool wm = detail::well_marked_unchecked(m.phi);
    std::cout << "well-marked: " << (wm ? "yes" : "no") << "\n";
    ok = ok && wm;
  }
  if (local) {
    auto lc = check_local_condition(m.phi, opts);
    if (lc.places.empty()) std::cout << "local condition: no properly refined places\n";
    for (const auto& p : lc.places) {
      std::cout << "local condition " << p.place << ": " << (p.holds ? "holds" : "fails");
      if (!p.never_enabled.empty()) {
        std::cout << " (never enabled:";
        for (const auto& t : p.never_enabled) std::cout << " " << t;
        std::cout << ")";
      }
      std::cout << "\n";
      if (!p.error.empty()) std::cout << "  " << p.error << "\n";
      for (const auto& v : p.alpha.failures) std::cout << "  " << describe(v) << "\n";
    }
    ok = ok && lc.holds;
  }
  return ok ? kPass : kNegative;
}

int cmd_certify(const std::string& path, bool audit, bool json, ExploreBounds bounds) {
  auto s = load_scenario(path);
  auto c = certify(s, bounds, audit);
  if (json) std::cout << to_json(c).dump(2) << "\n";
  else std::cout << format_certificate(c);
  return c.certified ? kPass : kNegative;
}

int cmd_refine_compose(const std::string& a, const std::string& b, const std::string& out) {
  auto l = load_refinement(a);
  auto r = load_refinement(b);
  try {
    auto rc = compose_refinements(l.net, l.phi, r.net, r.phi);
    emit(serialize_net(rc.net), out);
    return kPass;
  } catch (const NonCommutingDiagram& e) {
    std::cout << "diagram does not commute at " << e.node() << "\n";
    return kNegative;
  }
}

int cmd_unfold(const LgwfNet& n, std::size_t depth) {
  const PetriNet& net = n.net();
  try {
    auto bp = unfold(net, depth);
    std::cout << "conditions " << bp.conditions.size() << " events " << bp.events.size()
              << (bp.partial ? " (partial)" : "") << "\n";
    for (std::size_t i = 0; i < bp.conditions.size(); ++i)
      std::cout << "condition " << BranchingProcess::condition_name(i) << " " << net.place_name(bp.conditions[i].place)
                << "\n";
    for (std::size_t j = 0; j < bp.events.size(); ++j) {
      const auto& e = bp.events[j];
      std::cout << "event " << BranchingProcess::event_name(j) << " " << net.transition_name(e.transition) << " :";
      for (auto b : e.preset) std::cout << " " << BranchingProcess::condition_name(b);
      std::cout << " ->";
      for (auto b : e.postset) std::cout << " " << BranchingProcess::condition_name(b);
      std::cout << "\n";
    }
    std::vector<std::string> missing;
    auto counts = bp.occurrences();
    for (Index t = 0; t < net.transition_count(); ++t)
      if (!counts[t]) missing.push_back(net.transition_name(t));
    if (!missing.empty()) {
      std::cout << "never occurring:";
      for (const auto& t : missing) std::cout << " " << t;
      std::cout << "\n";
    }
    return kPass;
  } catch (const UnsafeNet& e) {
    std::cout << "unsafe: " << e.what() << "\n";
    return kNegative;
  }
}

int cmd_fmt(const std::string& path, bool in_place) {
  std::string text = read_file(path);
  std::string canonical;
  if (is_morphism_document(text)) canonical = serialize_morphism(load_morphism(path).phi);
  else canonical = serialize_net(parse_net(text));
  if (in_place) write_file(path, canonical);
  else std::cout << canonical;
  return kPass;
}

int cmd_reach(const LgwfNet& n, bool dot, ExploreBounds bounds) {
  const PetriNet& net = n.net();
  auto rg = explore(net, bounds);
  if (dot) {
    std::cout << to_dot(net, rg);
  } else {
    for (std::size_t v = 0; v < rg.vertices.size(); ++v) std::cout << "m" << v << " " << net.format(rg.vertices[v]) << "\n";
    for (const auto& e : rg.edges)
      std::cout << "m" << e.from << " " << net.transition_name(e.transition) << " m" << e.to << "\n";
  }
  if (rg.unbounded_witness) {
    std::cerr << "unbounded: exploration stopped at a strictly covering marking\n";
    return kNegative;
  }
  if (rg.truncated) {
    std::cerr << "truncated\n";
    return kInconclusive;
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifier for labeled generalized workflow nets"};
  app.require_subcommand(1);
  int code = kPass;

  std::string net_path, net2_path, out_path, map_path, manifest;
  Bounds bounds;

  auto* validate = app.add_subcommand("validate", "parse and validate a net");
  validate->add_option("net", net_path)->required();

  auto* check = app.add_subcommand("check", "behavioural checks");
  std::string property;
  check->add_option("property", property, "sound | smd | safe")->required()->check(CLI::IsMember({"sound", "smd", "safe"}));
  check->add_option("net", net_path)->required();
  add_bounds(check, bounds);

  auto* compose = app.add_subcommand("compose", "AS-composition of two nets");
  bool simplify = false, prefix = false;
  compose->add_option("net1", net_path)->required();
  compose->add_option("net2", net2_path)->required();
  compose->add_flag("--p-simplify", simplify, "merge places with equal neighbourhoods");
  compose->add_flag("--auto-prefix", prefix, "prefix clashing names with 1: and 2:");
  compose->add_option("-o,--output", out_path);

  auto* morph = app.add_subcommand("check-morphism", "validate a morphism file");
  bool hat = false, local = false, well_marked = false;
  morph->add_option("map", map_path)->required();
  morph->add_flag("--alpha-hat", hat, "also check final markings and labels");
  morph->add_flag("--local", local, "check the unfolding-based local condition");
  morph->add_flag("--well-marked", well_marked, "check well-markedness");
  add_bounds(morph, bounds);

  auto* refine = app.add_subcommand("refine", "refinement pipeline");
  refine->require_subcommand(1);
  auto* cert = refine->add_subcommand("certify", "certify a refinement scenario");
  bool audit = false, json = false;
  cert->add_option("scenario", manifest)->required();
  cert->add_flag("--audit", audit, "also explore the composed refined system");
  cert->add_flag("--json", json, "emit JSON");
  add_bounds(cert, bounds);
  auto* rcomp = refine->add_subcommand("compose", "compose two intermediate refinements");
  rcomp->add_option("left", net_path)->required();
  rcomp->add_option("right", net2_path)->required();
  rcomp->add_option("-o,--output", out_path);

  auto* unf = app.add_subcommand("unfold", "unfold a safe net");
  std::size_t depth = 10000;
  unf->add_option("net", net_path)->required();
  unf->add_option("--depth", depth, "maximum number of events");

  auto* reach = app.add_subcommand("reach", "print the reachability graph");
  bool dot = false;
  reach->add_option("net", net_path)->required();
  reach->add_flag("--dot", dot, "graph description output");
  add_bounds(reach, bounds);

  auto* fmt = app.add_subcommand("fmt", "print a net or morphism file in canonical form");
  bool in_place = false;
  fmt->add_option("file", net_path)->required();
  fmt->add_flag("-i,--in-place", in_place, "rewrite the file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) code = cmd_validate(net_path);
    else if (*check) {
      auto n = load_net(net_path);
      if (property == "sound") code = cmd_sound(n, bounds.get());
      else if (property == "smd") code = cmd_smd(n);
      else code = cmd_safe(n, bounds.get());
    } else if (*compose) code = cmd_compose(net_path, net2_path, simplify, prefix, out_path);
    else if (*morph) code = cmd_check_morphism(map_path, hat, local, well_marked, bounds.get());
    else if (*cert) code = cmd_certify(manifest, audit, json, bounds.get());
    else if (*rcomp) code = cmd_refine_compose(net_path, net2_path, out_path);
    else if (*unf) code = cmd_unfold(load_net(net_path), depth);
    else if (*reach) code = cmd_reach(load_net(net_path), dot, bounds.get());
    else if (*fmt) code = cmd_fmt(net_path, in_place);
  } catch (const IncompleteExploration& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return code;
}
