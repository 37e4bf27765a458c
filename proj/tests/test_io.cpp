#include <gtest/gtest.h>

#include <filesystem>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "wfnet/wfnet.hpp"

using namespace wfnet;
using wfgen::fixture;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_net(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(NetFormat, EveryFixtureRoundTripsByteForByte) {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(WFNET_FIXTURES)) {
    auto path = entry.path();
    std::string text = read_file(path);
    if (path.extension() == ".wfnet") {
      EXPECT_EQ(serialize_net(parse_net(text)), text) << path;
      ++n;
    } else if (path.extension() == ".wfmap") {
      EXPECT_EQ(serialize_morphism(load_morphism(path).phi), text) << path;
      ++n;
    }
  }
  EXPECT_GT(n, 20u);
}

TEST(NetFormat, GeneratedNetsRoundTrip) {
  wfgen::Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    auto ch = wfgen::random_choreography(rng, wfgen::uniform(rng, 1, 6));
    auto c = as_compose(ch.left.build(), ch.right.build()).result;
    auto text = serialize_net(c);
    auto back = parse_net(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_net(back), text);
  }
}

TEST(NetFormat, CommentsAndBlankLinesAreIgnored) {
  auto n = parse_net("# wfnet v1\n\n# a comment\nnet c\n  place s init\nplace f final\ntrans t\narc s t\narc t f\n");
  EXPECT_EQ(n.net().name(), "c");
  EXPECT_EQ(serialize_net(n), "# wfnet v1\nnet c\nplace f final\nplace s init\ntrans t\narc s t\narc t f\n");
}

TEST(NetFormat, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("net x\n"), 1u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\nplace\n"), 3u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\nplace s sometimes\n"), 3u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\nplace s\ntrans t async=c\n"), 4u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\nnet y\n"), 3u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\nwire a b\n"), 3u);
  EXPECT_EQ(error_line("# wfnet v1\nplace s\n"), 1u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\narc a\n"), 3u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\nplace ⊥in:p\n"), 3u);
  EXPECT_EQ(error_line("# wfnet v1\nnet x\nplace s init init\n"), 3u);
}

TEST(NetFormat, SemanticErrorsAreViolations) {
  EXPECT_THROW(parse_net("# wfnet v1\nnet x\nplace s init\nplace f\ntrans t\narc s t\narc t f\n"), StructuralViolation);
  try {
    parse_net("# wfnet v1\nnet x\nplace s init\nplace f final\ntrans t sync=x async=y!\narc s t\narc t f\n");
    FAIL();
  } catch (const LabelViolation& e) {
    EXPECT_TRUE(e.has_clause("lgwf.2"));
  }
  EXPECT_THROW(parse_net("# wfnet v1\nnet x\nplace s init\nplace f final\ntrans t\narc s t\narc t g\n"),
               StructuralViolation);
}

TEST(NetFormat, ChannelPlacesInMarkingsAreRejected) {
  std::string text = R"(# wfnet v1
net x
place i init
place k chan=c final
place f final
trans a async=c!
trans b async=c?
arc i a
arc a k
arc k b
arc b f
)";
  EXPECT_THROW(parse_net(text), ViolationError);
}

TEST(MorphismFormat, Errors) {
  auto src = wfgen::load_fixture("chain").net();
  EXPECT_THROW(parse_morphism("# wfnet v1\nmap s s\n", src, src), ParseError);
  EXPECT_THROW(parse_morphism("# wfnet v1\nmorphism chain => chain\n", src, src), ParseError);
  EXPECT_THROW(parse_morphism("# wfnet v1\nmorphism chain -> chain\nmap s s\nmap s f\n", src, src), ParseError);
  EXPECT_THROW(parse_morphism("# wfnet v1\nmorphism other -> chain\nmap s s\n", src, src), MapMismatch);
  EXPECT_THROW(parse_morphism("# wfnet v1\nmorphism chain -> chain\nmap s s\n", src, src), NotTotal);
  EXPECT_THROW(parse_morphism("# wfnet v1\nmorphism chain -> chain\nmap s s\nmap t t\nmap f q\n", src, src),
               UnknownNode);
  auto ok = parse_morphism("# wfnet v1\nmorphism chain -> chain\nmap s s\nmap t t\nmap f f\n", src, src);
  EXPECT_EQ(ok, Morphism::identity(src));
}

TEST(Manifests, ScenarioAndRefinement) {
  auto s = load_scenario(fixture("pipeline.scenario"));
  EXPECT_EQ(s.name, "pipeline");
  EXPECT_EQ(s.r1.net().name(), "impl_left");
  EXPECT_EQ(s.phi2.target().name(), "iface_right");
  auto dir = std::filesystem::temp_directory_path() / "wfnet-io-test";
  std::filesystem::create_directories(dir);
  write_file(dir / "bad.scenario", "# wfnet v1\nscenario x\nr1 a\n");
  EXPECT_THROW(load_scenario(dir / "bad.scenario"), ParseError);
  write_file(dir / "dup.scenario", "# wfnet v1\nscenario x\nr1 a\nr1 b\n");
  EXPECT_THROW(load_scenario(dir / "dup.scenario"), ParseError);
  write_file(dir / "unknown.scenario", "# wfnet v1\nscenario x\nr3 a\n");
  EXPECT_THROW(load_scenario(dir / "unknown.scenario"), ParseError);
  EXPECT_THROW(read_file(dir / "missing.wfnet"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Manifests, RefinementManifest) {
  auto r = load_refinement(fixture("pipeline_left.refinement"));
  EXPECT_EQ(r.name, "pipeline_left");
  EXPECT_TRUE(check_alpha_hat(r.phi, r.net, r.interface).valid);
}
