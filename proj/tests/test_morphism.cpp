#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"
#include "wfnet/wfnet.hpp"

using namespace wfnet;
using wfgen::fixture;
using wfgen::load_fixture;

namespace {

// p -> u -> q refines s in s -> x -> f; `token` says where the initial token sits.
Morphism token_placement(const std::string& token) {
  PetriNet n1("n1", {"p", "q", "f"}, {"u", "x"}, {{"p", "u"}, {"u", "q"}, {"q", "x"}, {"x", "f"}}, {{token, 1}});
  PetriNet n2("n2", {"s", "f"}, {"x"}, {{"s", "x"}, {"x", "f"}}, {{"s", 1}});
  return Morphism::from_names(n1, n2, {{"p", "s"}, {"u", "s"}, {"q", "s"}, {"x", "x"}, {"f", "f"}});
}

bool has(const MorphismReport& r, const std::string& clause) { return r.has_clause(clause); }

}  // namespace

TEST(Morphism, FromNamesChecksTotalityAndNames) {
  auto a = load_fixture("chain").net();
  EXPECT_THROW(Morphism::from_names(a, a, {{"s", "s"}, {"t", "t"}}), NotTotal);
  EXPECT_THROW(Morphism::from_names(a, a, {{"s", "s"}, {"t", "t"}, {"f", "nope"}}), UnknownNode);
  EXPECT_THROW(Morphism::from_names(a, a, {{"s", "s"}, {"t", "t"}, {"f", "f"}, {"zz", "f"}}), UnknownNode);
  try {
    Morphism::from_names(a, a, {{"s", "s"}});
  } catch (const NotTotal& e) {
    EXPECT_EQ(e.unmapped(), (std::vector<std::string>{"f", "t"}));
  }
  EXPECT_THROW(Morphism(a, a, {}, {}), MapMismatch);
}

TEST(Morphism, IdentityIsAValidAlphaMorphism) {
  for (auto name : {"chain", "choice", "iface_left", "impl_right"}) {
    auto n = load_fixture(name);
    auto id = Morphism::identity(n.net());
    EXPECT_TRUE(id.surjective());
    EXPECT_TRUE(check_alpha(id).valid) << name;
    EXPECT_TRUE(check_alpha_hat(id, n, n).valid) << name;
    EXPECT_TRUE(properly_refined_places(id).empty());
  }
}

TEST(Morphism, ImageAndInverse) {
  auto m = load_morphism(fixture("local_refined.wfmap"));
  const auto& phi = m.phi;
  EXPECT_EQ(phi.image("c1"), "p2");
  EXPECT_EQ(phi.inverse(phi.target().node("x")).size(), 2u);
  EXPECT_EQ(phi.inverse(phi.target().node("p2")).size(), 7u);
  auto img = phi.image(phi.source().marking({"c1", "d1"}));
  EXPECT_EQ(phi.target().format(img), "{p2:1}");
}

TEST(Morphism, ComposeMapsRequiresMatchingNets) {
  auto m = load_morphism(fixture("local_refined.wfmap"));
  auto id1 = Morphism::identity(m.phi.source());
  EXPECT_EQ(compose_maps(id1, m.phi), m.phi);
  EXPECT_THROW(compose_maps(m.phi, m.phi), MapMismatch);
}

TEST(AlphaMorphism, LocalFixtureIsStructurallyValid) {
  auto m = load_morphism(fixture("local_refined.wfmap"));
  auto r = check_alpha(m.phi);
  EXPECT_TRUE(r.valid) << describe(r.failures);
  EXPECT_EQ(properly_refined_places(m.phi), std::set<std::string>{"p2"});
  // 5e witnesses: c1 and d1 sit in different components.
  ASSERT_TRUE(r.sm_witnesses.count("c1") && r.sm_witnesses.count("d1"));
  EXPECT_FALSE(r.sm_witnesses.at("c1").contains_place(m.phi.source().place("d1")));
}

TEST(AlphaMorphism, PlaceRefinementWithTokenInside) {
  auto good = token_placement("p");
  EXPECT_TRUE(check_alpha(good).valid);
  EXPECT_EQ(properly_refined_places(good), std::set<std::string>{"s"});
  EXPECT_TRUE(check_well_marked(good));
  auto misplaced = token_placement("q");
  auto r = check_alpha(misplaced);
  EXPECT_TRUE(r.valid) << describe(r.failures);
  EXPECT_FALSE(check_well_marked(misplaced));
  // The misplaced source is not a GWF-net: p lies on no path from m0.
  EXPECT_THROW(check_gwf(misplaced.source(), std::set<std::string>{"f"}), StructuralViolation);
  EXPECT_NO_THROW(check_gwf(good.source(), std::set<std::string>{"f"}));
}

TEST(AlphaMorphism, WellMarkedRequiresValidity) {
  auto a = load_fixture("chain").net();
  auto b = load_fixture("choice").net();
  auto bad = Morphism::from_names(a, b, {{"s", "s"}, {"t", "t1"}, {"f", "f"}});
  EXPECT_FALSE(check_alpha(bad).valid);
  EXPECT_TRUE(check_alpha(bad).has_clause("surjective"));
  EXPECT_THROW(check_well_marked(bad), InvalidMorphism);
  EXPECT_THROW(require_valid(bad), InvalidMorphism);
  EXPECT_THROW(properly_refined_places(bad), InvalidMorphism);
}

TEST(AlphaMorphism, ClauseFailures) {
  auto chain = load_fixture("chain").net();
  // Place mapped to a transition; t collapsed onto a place with f mapped elsewhere.
  PetriNet n1("n1", {"s", "m", "f"}, {"a", "b"}, {{"s", "a"}, {"a", "m"}, {"m", "b"}, {"b", "f"}}, {{"s", 1}});
  auto r = check_alpha(Morphism::from_names(n1, chain, {{"s", "s"}, {"a", "t"}, {"m", "t"}, {"b", "t"}, {"f", "f"}}));
  EXPECT_TRUE(has(r, "1"));
  r = check_alpha(Morphism::from_names(n1, chain, {{"s", "s"}, {"a", "s"}, {"m", "s"}, {"b", "f"}, {"f", "f"}}));
  EXPECT_TRUE(has(r, "surjective"));
  EXPECT_TRUE(has(r, "4"));
  // Initial marking not preserved.
  PetriNet off("n1", {"s", "f"}, {"t"}, {{"s", "t"}, {"t", "f"}}, {{"f", 1}});
  r = check_alpha(Morphism::from_names(off, chain, {{"s", "s"}, {"t", "t"}, {"f", "f"}}), {false, {}});
  EXPECT_TRUE(has(r, "2"));
  // Transition neighbourhood mismatch.
  r = check_alpha(Morphism::from_names(chain, chain, {{"s", "f"}, {"t", "t"}, {"f", "s"}}), {false, {}});
  EXPECT_TRUE(has(r, "3"));
}

TEST(AlphaMorphism, CyclicSubnetFails5a) {
  PetriNet n1("n1", {"s", "a", "b", "f"}, {"t", "l1", "l2", "x"},
              {{"s", "t"}, {"t", "a"}, {"a", "l1"}, {"l1", "b"}, {"b", "l2"}, {"l2", "a"}, {"a", "x"}, {"x", "f"}},
              {{"s", 1}});
  PetriNet n2("n2", {"s", "p", "f"}, {"t", "x"}, {{"s", "t"}, {"t", "p"}, {"p", "x"}, {"x", "f"}}, {{"s", 1}});
  auto r = check_alpha(Morphism::from_names(
      n1, n2, {{"s", "s"}, {"t", "t"}, {"a", "p"}, {"b", "p"}, {"l1", "p"}, {"l2", "p"}, {"x", "x"}, {"f", "f"}}));
  EXPECT_TRUE(has(r, "5a"));
}

TEST(AlphaMorphism, OutputPlaceMissingAnAbstractConsumerFails5c) {
  // p2 has consumers x and y; the refined output c only feeds x.
  auto n2 = load_fixture("local_abstract").net();
  PetriNet n1("n1", {"s", "a", "c", "d", "f"}, {"t", "u", "x1", "y1"},
              {{"s", "t"}, {"t", "a"}, {"a", "u"}, {"u", "c"}, {"u", "d"}, {"c", "x1"}, {"d", "y1"}, {"x1", "f"},
               {"y1", "f"}},
              {{"s", 1}});
  auto r = check_alpha(Morphism::from_names(
      n1, n2, {{"s", "s"}, {"t", "t"}, {"a", "p2"}, {"u", "p2"}, {"c", "p2"}, {"d", "p2"}, {"x1", "x"}, {"y1", "y"},
               {"f", "f"}}));
  EXPECT_TRUE(has(r, "5c"));
}

TEST(AlphaMorphism, PreconditionsAreReported) {
  auto c = as_compose(load_fixture("optional_sender"), load_fixture("receiver"));
  auto id = Morphism::identity(c.result.net());
  auto r = check_alpha(id);
  EXPECT_TRUE(has(r, "pre:smd-source"));
  EXPECT_TRUE(has(r, "pre:smd-target"));
  PetriNet unsafe("u", {"i", "a", "b", "c", "f"}, {"t", "u", "v", "w"},
                  {{"i", "t"}, {"t", "a"}, {"t", "b"}, {"a", "u"}, {"u", "c"}, {"b", "v"}, {"v", "c"}, {"c", "w"},
                   {"w", "f"}},
                  {{"i", 1}});
  r = check_alpha(Morphism::identity(unsafe));
  EXPECT_TRUE(has(r, "pre:safe-source"));
  // Without preconditions the unsafe net is judged by the clauses alone; it
  // has no sequential components, so 5e fails.
  r = check_alpha(Morphism::identity(unsafe), {false, {}});
  EXPECT_FALSE(has(r, "pre:safe-source"));
  EXPECT_TRUE(has(r, "5e"));
}

TEST(AlphaHat, FinalMarkingAndLabels) {
  auto m = load_morphism(fixture("impl_left.wfmap"));
  auto r = check_alpha_hat(m.phi, m.source, m.target);
  EXPECT_TRUE(r.valid) << describe(r.failures);
  // Relabel b_1 with a different sync label.
  auto spec = wfgen::spec_of(m.source);
  spec.labels.sync["b_1"] = "other";
  auto relabeled = spec.build();
  auto phi = Morphism::from_names(relabeled.net(), m.target.net(), m.phi.to_names());
  EXPECT_TRUE(check_alpha_hat(phi, relabeled, m.target).has_clause("3'"));
  // The labeled nets must be the ones the morphism is stated over.
  EXPECT_THROW(check_alpha_hat(m.phi, m.target, m.target), MapMismatch);
}

TEST(LocalNets, SharedArtificialPlaces) {
  auto m = load_morphism(fixture("local_refined.wfmap"));
  auto l = build_local_nets(m.phi, "p2");
  EXPECT_TRUE(l.s2.find(artificial_input("p2")) && l.s2.find(artificial_output("p2")));
  EXPECT_EQ(l.s2.place_count(), 3u);
  EXPECT_EQ(l.s2.transition_count(), 3u);
  EXPECT_EQ(l.s1.transition_count(), 7u);  // t, u1, u2, x1, x2, y1, y2
  EXPECT_EQ(l.s1.format(l.s1.initial()), "{" + artificial_input("p2") + ":1}");
  EXPECT_THROW(build_local_nets(m.phi, "s"), NotProperlyRefined);
}

TEST(LocalNets, InitialPlaceWithoutInputSide) {
  auto phi = token_placement("p");
  auto l = build_local_nets(phi, "s");
  EXPECT_EQ(l.s2.format(l.s2.initial()), "{s:1}");
  EXPECT_EQ(l.s1.format(l.s1.initial()), "{p:1}");
  EXPECT_FALSE(l.s1.find(artificial_input("s")));
  EXPECT_TRUE(check_local_condition(phi).holds);
}

TEST(LocalCondition, FailureIsLocalizedToTheNeverEnabledTransition) {
  auto m = load_morphism(fixture("local_refined.wfmap"));
  auto lc = check_local_condition(m.phi);
  EXPECT_FALSE(lc.holds);
  ASSERT_EQ(lc.places.size(), 1u);
  EXPECT_EQ(lc.places[0].place, "p2");
  EXPECT_EQ(lc.places[0].never_enabled, std::vector<std::string>{"y"});
  EXPECT_TRUE(lc.places[0].alpha.has_clause("surjective"));
}

TEST(LocalCondition, CorrectedVariantHolds) {
  auto m = load_morphism(fixture("local_refined_ok.wfmap"));
  EXPECT_TRUE(check_well_marked(m.phi));
  EXPECT_TRUE(check_soundness(m.source.gwf()).sound);
  auto lc = check_local_condition(m.phi);
  EXPECT_TRUE(lc.holds);
  EXPECT_TRUE(lc.places.at(0).never_enabled.empty());
}

TEST(LocalCondition, FailureImpliesUnsoundRefinement) {
  auto m = load_morphism(fixture("local_refined.wfmap"));
  EXPECT_FALSE(check_local_condition(m.phi).holds);
  EXPECT_FALSE(check_soundness(m.source.gwf()).sound);
}

TEST(Behaviour, PreservationAndReflectionOnTheCorrectedFixture) {
  auto m = load_morphism(fixture("local_refined_ok.wfmap"));
  auto p = check_preservation(m.phi);
  EXPECT_TRUE(p.holds) << describe(p.failures);
  auto r = check_reflection(m.phi, m.source.final_marking());
  EXPECT_TRUE(r.holds) << describe(r.failures);
}

TEST(Behaviour, ReflectionNeedsASoundSource) {
  auto m = load_morphism(fixture("local_refined.wfmap"));
  EXPECT_THROW(check_reflection(m.phi, m.source.final_marking()), SourceNotSound);
  auto r = check_reflection(m.phi, m.source.final_marking(), {}, false);
  EXPECT_FALSE(r.holds);
  bool y_missing = false;
  for (const auto& v : r.failures) y_missing = y_missing || (v.clause == "reflection.transition" && v.nodes[0] == "y");
  EXPECT_TRUE(y_missing);
}

TEST(Behaviour, RandomRefinementsPreserveAndReflect) {
  wfgen::Rng rng(77);
  for (int k = 0; k < 40; ++k) {
    auto abs = wfgen::random_sound_net(rng, wfgen::uniform(rng, 1, 6));
    auto ref = wfgen::refine(rng, abs, wfgen::uniform(rng, 1, 3));
    auto n2 = abs.build();
    auto n1 = ref.net.build();
    auto phi = wfgen::morphism_of(ref, n1, n2);
    auto a = check_alpha_hat(phi, n1, n2);
    ASSERT_TRUE(a.valid) << describe(a.failures) << serialize_net(n1) << serialize_morphism(phi);
    EXPECT_TRUE(check_well_marked(phi));
    EXPECT_TRUE(check_local_condition(phi).holds);
    EXPECT_TRUE(check_preservation(phi).holds);
    EXPECT_TRUE(check_reflection(phi, n1.final_marking()).holds);
  }
}
