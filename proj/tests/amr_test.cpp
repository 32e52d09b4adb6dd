#include "doctest.h"

#include <chrono>
#include <optional>
#include <random>
#include <sstream>

#include "sgram/amr.hpp"
#include "sgram/error.hpp"
#include "support.hpp"

using namespace sgram;
using namespace sgram::amr;

namespace {

ErrorCode parse_error(std::string_view text, std::size_t* offset = nullptr) {
  try {
    parse_penman(text);
  } catch (const Error& e) {
    if (offset != nullptr) *offset = e.offset().value_or(~std::size_t{0});
    return e.code();
  }
  FAIL("expected a parse error for: " << text);
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("parse the retriever graph") {
  const Graph g = parse_penman(testing::kRetrieverPenman);
  CHECK(g.root() == "z0");
  REQUIRE(g.nodes().size() == 4);
  CHECK(g.concept_of("z0") == "stand-01");
  CHECK(g.concept_of("z1") == "retriever");
  CHECK(g.concept_of("z2") == "gold");
  CHECK(g.concept_of("z3") == "snow");
  REQUIRE(g.edges().size() == 3);
  CHECK(g.edges()[0] == Edge{"z0", ":ARG1", VariableRef{"z1"}, true});
  CHECK(g.edges()[1] == Edge{"z1", ":mod", VariableRef{"z2"}, true});
  CHECK(g.edges()[2] == Edge{"z0", ":ARG2", VariableRef{"z3"}, true});
  CHECK(validate(g).empty());
}

TEST_CASE("single node") {
  const Graph g = parse_penman("(z0 / dog)");
  CHECK(g.root() == "z0");
  CHECK(g.nodes().size() == 1);
  CHECK(g.edges().empty());
  CHECK(serialize_penman(g) == "(z0 / dog)");
}

TEST_CASE("re-entrancy becomes a non-tree edge") {
  const Graph g = parse_penman(testing::kWantPenman);
  CHECK(g.nodes().size() == 3);
  REQUIRE(g.edges().size() == 3);
  CHECK(g.tree_edges().size() == 2);
  CHECK(g.edges()[2] == Edge{"z2", ":ARG0", VariableRef{"z1"}, false});
  CHECK(serialize_penman(g) == testing::kWantPenman);
}

TEST_CASE("serialize reproduces the canonical string") {
  CHECK(serialize_penman(parse_penman(testing::kRetrieverPenman)) ==
        testing::kRetrieverPenman);
  const char* messy =
      "(z0/stand-01\n  :ARG1 (z1 / retriever\n\t:mod (z2 / gold))\n  :ARG2 (z3 / snow)\n)";
  CHECK(serialize_penman(parse_penman(messy)) == testing::kRetrieverPenman);
}

TEST_CASE("variables need not start with z") {
  const Graph g = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
  CHECK(g.concept_of("b") == "boy");
  CHECK(g.edges()[2].target == EdgeTarget{VariableRef{"b"}});
}

TEST_CASE("constants") {
  const Graph g = parse_penman(
      "(z0 / city :name (z1 / name :op1 \"New York\") :polarity - :quant 3 :mode imperative)");
  REQUIRE(g.edges().size() == 5);
  CHECK(g.edges()[1].target == EdgeTarget{Constant{"\"New York\""}});
  CHECK(std::get<Constant>(g.edges()[1].target).surface() == "New York");
  CHECK(g.edges()[2].target == EdgeTarget{Constant{"-"}});
  CHECK(g.edges()[3].target == EdgeTarget{Constant{"3"}});
  CHECK(g.edges()[4].target == EdgeTarget{Constant{"imperative"}});
  CHECK(serialize_penman(g) ==
        "(z0 / city :name (z1 / name :op1 \"New York\") :polarity - :quant 3 :mode imperative)");
}

TEST_CASE("forward references resolve") {
  const Graph g = parse_penman("(a / and :op1 b :op2 (b / dog))");
  CHECK(g.edges()[0] == Edge{"a", ":op1", VariableRef{"b"}, false});
  CHECK(g.edges()[1].tree);
}

TEST_CASE("inverse roles and duplicate roles are kept verbatim") {
  const Graph g = parse_penman("(z0 / dog :ARG0-of (z1 / run-02) :mod (z2 / big) :mod (z3 / brown))");
  CHECK(g.edges()[0].role == ":ARG0-of");
  CHECK(g.edges()[1].role == ":mod");
  CHECK(g.edges()[2].role == ":mod");
}

TEST_CASE("parse errors carry kind and offset") {
  std::size_t offset = 0;
  CHECK(parse_error("", &offset) == ErrorCode::kEmptyInput);
  CHECK(parse_error("   \n ") == ErrorCode::kEmptyInput);

  CHECK(parse_error("(z0 / dog", &offset) == ErrorCode::kUnbalancedParentheses);
  CHECK(offset == 9);
  CHECK(parse_error("(z0 / dog))", &offset) == ErrorCode::kUnbalancedParentheses);
  CHECK(offset == 10);
  CHECK(parse_error(")") == ErrorCode::kUnbalancedParentheses);

  CHECK(parse_error("(z0 / dog :ARG0 (z0 / cat))", &offset) ==
        ErrorCode::kDuplicateVariableDeclaration);
  CHECK(offset == 17);

  CHECK(parse_error("(z0 / dog :ARG0 z9)", &offset) ==
        ErrorCode::kUndeclaredVariableReference);
  CHECK(offset == 16);

  CHECK(parse_error("(z0 dog)") == ErrorCode::kSyntax);
  CHECK(parse_error("(z0 / dog :ARG0)") == ErrorCode::kSyntax);
  CHECK(parse_error("(z0 / dog) (z1 / cat)") == ErrorCode::kSyntax);
  CHECK(parse_error("(z0 / dog :op1 \"open)") == ErrorCode::kSyntax);
  CHECK(parse_error("dog") == ErrorCode::kSyntax);
}

TEST_CASE("validate") {
  SUBCASE("valid graph") {
    CHECK(validate(parse_penman(testing::kRetrieverPenman)).empty());
  }
  SUBCASE("dangling edge") {
    Graph g("z0", {{"z0", "dog"}}, {{"z0", ":ARG0", VariableRef{"z9"}, false}});
    const auto d = validate(g);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == Diagnostic{DiagnosticKind::kUndeclaredVariableReference, "z9"});
    CHECK(d[0].to_string() == "UndeclaredVariableReference(z9)");
  }
  SUBCASE("missing tree edge") {
    const Graph full = parse_penman(testing::kRetrieverPenman);
    std::vector<Edge> edges;
    for (const auto& e : full.edges()) {
      if (!(e.targets_variable() && e.target_variable() == "z2")) edges.push_back(e);
    }
    Graph g(full.root(), full.nodes(), edges);
    const auto d = validate(g);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == Diagnostic{DiagnosticKind::kUnreachableNode, "z2"});
  }
  SUBCASE("duplicate variable and bad role") {
    Graph g("z0", {{"z0", "dog"}, {"z0", "cat"}},
            {{"z0", "mod", Constant{"-"}, false}});
    const auto d = validate(g);
    CHECK(std::count(d.begin(), d.end(),
                     Diagnostic{DiagnosticKind::kDuplicateVariable, "z0"}) == 1);
    CHECK(std::count(d.begin(), d.end(),
                     Diagnostic{DiagnosticKind::kInvalidRole, "mod"}) == 1);
  }
  SUBCASE("missing root") {
    Graph g("z5", {{"z0", "dog"}}, {});
    const auto d = validate(g);
    CHECK(std::count(d.begin(), d.end(),
                     Diagnostic{DiagnosticKind::kMissingRoot, "z5"}) == 1);
  }
}

TEST_CASE("frames") {
  CHECK(is_frame("stand-01"));
  CHECK(is_frame("near-02"));
  CHECK_FALSE(is_frame("retriever"));
  CHECK_FALSE(is_frame("x-1"));
  CHECK_FALSE(is_frame("-01"));
  CHECK(frame_lemma("stand-01") == "stand");
  CHECK(frame_lemma("look-up-05") == "look-up");
  CHECK(frame_lemma("dog") == "dog");
}

TEST_CASE("round trip on random graphs") {
  std::mt19937 rng(20240601);
  for (int i = 0; i < 500; ++i) {
    const Graph g = testing::random_graph(rng, {});
    REQUIRE(validate(g).empty());
    const std::string text = serialize_penman(g);
    INFO(text);
    const Graph back = parse_penman(text);
    CHECK(back == g);
    CHECK(back.tree_edges().size() == back.nodes().size() - 1);
  }
}

TEST_CASE("parser is total on fuzzed input") {
  std::mt19937 rng(7);
  const std::string alphabet = "()()/ :ARG0z1z0dog\"-\n";
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (std::size_t n = len(rng); n > 0; --n) s += alphabet[ch(rng)];
    try {
      const Graph g = parse_penman(s);
      CHECK(validate(g).empty());
    } catch (const Error& e) {
      REQUIRE(e.offset().has_value());
      CHECK(*e.offset() <= s.size());
    }
  }
  // Mutations of a valid graph: drop one character.
  const std::string base = testing::kWantPenman;
  for (std::size_t cut = 0; cut < base.size(); ++cut) {
    std::string s = base;
    s.erase(cut, 1);
    std::optional<Graph> g;
    try {
      g = parse_penman(s);
    } catch (const Error& e) {
      CHECK(e.offset().has_value());
    }
    if (g) CHECK(validate(*g).empty());
  }
}

TEST_CASE("PENMAN file blocks") {
  std::istringstream in(
      "# ::id r1\n# ::snt A dog\n(z0 / dog)\n\n\n"
      "# a plain comment\n# ::id r2\n(z0 / stand-01\n  :ARG1 (z1 / cat))\n\n"
      "# ::id lonely\n\n");
  const auto blocks = read_penman_blocks(in);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].id() == "r1");
  CHECK(blocks[0].metadata.at("snt") == "A dog");
  CHECK(blocks[0].text == "(z0 / dog)");
  CHECK(blocks[0].line == 1);
  CHECK(blocks[1].line == 6);
  CHECK(parse_penman(blocks[1].text).edges().size() == 1);
}
