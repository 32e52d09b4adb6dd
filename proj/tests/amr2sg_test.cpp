#include "doctest.h"

#include <array>
#include <random>
#include <regex>

#include "sgram/amr2sg.hpp"
#include "sgram/corpus_io.hpp"
#include "sgram/error.hpp"
#include "support.hpp"

using namespace sgram;
using amr2sg::RuleConfig;
using testing::TupleKey;
using testing::interpret_rules;

namespace {

sg::SceneGraph rules(const char* penman) {
  return amr2sg::convert_rules(amr::parse_penman(penman));
}

corpus::RegionRecord record(const std::string& id, const char* penman) {
  corpus::RegionRecord r;
  r.image_id = "img";
  r.region_id = id;
  r.description = "Golden retriever standing in the snow";
  r.ground_truth.add_attribute("retriever", "golden");
  r.ground_truth.add_relation("retriever", "standing in", "snow");
  if (penman != nullptr) r.amr = penman;
  return r;
}

}  // namespace

TEST_CASE("rules on the retriever graph") {
  const auto g = rules(testing::kRetrieverPenman);
  CHECK(testing::tuple_keys(g) ==
        std::vector<TupleKey>{{"retriever"}, {"retriever", "gold"},
                              {"retriever", "stand in", "snow"}, {"snow"}});
  CHECK(sg::serialize_sg(g) ==
        "( retriever ) ( snow ) ( retriever , gold ) ( retriever , stand in , snow )");
}

TEST_CASE("single object and single-argument frame") {
  CHECK(sg::serialize_sg(rules("(z0 / dog)")) == "( dog )");
  CHECK(sg::serialize_sg(rules("(z0 / stand-01 :ARG1 (z1 / dog))")) ==
        "( dog ) ( dog , stand )");
}

TEST_CASE("frame shapes") {
  CHECK(sg::serialize_sg(rules("(z0 / hold-01 :ARG0 (z1 / man) :ARG1 (z2 / umbrella))")) ==
        "( man ) ( umbrella ) ( man , hold , umbrella )");
  CHECK(sg::serialize_sg(rules("(z0 / sit-01 :ARG1 (z1 / cat) :location (z2 / table))")) ==
        "( cat ) ( table ) ( cat , sit in , table )");
  CHECK(sg::serialize_sg(rules("(z0 / give-01 :ARG0 (z1 / man) :ARG2 (z2 / dog))")) ==
        "( dog ) ( man ) ( man , give , dog )");
  CHECK(sg::serialize_sg(rules("(z0 / rain-01)")) == "");
  CHECK(sg::serialize_sg(rules("(z0 / rain-01 :location (z1 / city))")) == "( city )");
  // a frame child is not an endpoint
  CHECK(sg::serialize_sg(rules("(z0 / want-01 :ARG0 (z1 / dog) :ARG1 (z2 / eat-01 :ARG0 z1))")) ==
        "( dog ) ( dog , eat ) ( dog , want )");
  // constants under attribute roles
  CHECK(sg::serialize_sg(rules("(z0 / car :mod \"Red\" :polarity -)")) ==
        "( car ) ( car , red )");
  // a node reached by a core role is an object even when also modified
  CHECK(sg::serialize_sg(rules("(z0 / see-01 :ARG0 (z1 / man) :ARG1 (z2 / dog :mod z3) :ARG2 (z3 / hat))")) ==
        "( dog ) ( hat ) ( man ) ( dog , hat ) ( man , see , dog )");
}

TEST_CASE("custom configuration") {
  RuleConfig cfg;
  cfg.locative_roles = {{":location", "at"}, {":destination", "to"}};
  const auto g = amr2sg::convert_rules(
      amr::parse_penman("(z0 / go-02 :ARG0 (z1 / boy) :destination (z2 / school))"), cfg);
  CHECK(sg::serialize_sg(g) == "( boy ) ( school ) ( boy , go to , school )");

  RuleConfig bad;
  bad.core_roles = {"ARG0"};
  CHECK_THROWS_AS(bad.check(), Error);
  CHECK_NOTHROW(RuleConfig{}.check());
}

TEST_CASE("rule converter equals the brute-force interpreter") {
  RuleConfig alternate;
  alternate.attribute_roles = {":mod", ":part"};
  alternate.core_roles = {":ARG1", ":ARG0"};
  alternate.locative_roles = {{":location", "at"}, {":ARG2", "near"}};
  alternate.locative_fallback_role = ":ARG0";

  const RuleConfig defaults;
  std::mt19937 rng(424242);
  for (int i = 0; i < 500; ++i) {
    const auto g = testing::random_graph(rng, {8, 2, true});
    INFO(amr::serialize_penman(g));
    for (const RuleConfig* cfg : std::array<const RuleConfig*, 2>{&defaults, &alternate}) {
      const RuleConfig& use = *cfg;
      const auto out = amr2sg::convert_rules(g, use);
      CHECK(testing::tuple_keys(out) == interpret_rules(g, use));

      std::set<std::string> concepts;
      for (const auto& n : g.nodes()) concepts.insert(n.concept_label);
      for (const auto& o : out.objects()) CHECK(concepts.count(o.name) == 1);
      CHECK(amr2sg::convert_rules(g, use).same_tuples(out));
    }
  }
}

TEST_CASE("training pair export") {
  const auto one = amr2sg::export_training_pairs({record("r1", testing::kRetrieverPenman)},
                                                 linearize::Strategy::kDfs);
  REQUIRE(one.pairs.size() == 1);
  CHECK(one.pairs[0].input == testing::kRetrieverPenman);
  CHECK(one.pairs[0].target ==
        "( retriever ) ( snow ) ( retriever , golden ) ( retriever , standing in , snow )");
  CHECK(one.pairs[0].to_json_line() ==
        std::string(R"({"input":")") + testing::kRetrieverPenman +
            R"j(","target":"( retriever ) ( snow ) ( retriever , golden ) ( retriever , standing in , snow )","region_id":"r1","strategy":"dfs"})j");

  CHECK(amr2sg::export_training_pairs({}, linearize::Strategy::kBfs).pairs.empty());

  const auto three = amr2sg::export_training_pairs(
      {record("a", testing::kRetrieverPenman), record("b", nullptr),
       record("c", "(z0 / dog)")},
      linearize::Strategy::kBfs);
  CHECK(three.pairs.size() == 2);
  CHECK(three.skipped() == 1);
  CHECK(three.warnings[0].region_id == "b");
  CHECK(three.pairs.size() == 3 - three.skipped());

  const auto broken = amr2sg::export_training_pairs({record("x", "(z0 / dog")},
                                                    linearize::Strategy::kDfs);
  CHECK(broken.pairs.empty());
  CHECK(broken.skipped() == 1);
}

TEST_CASE("export applies the grounding filter") {
  auto r = record("r", testing::kRetrieverPenman);
  r.ground_truth.add_attribute("bus", "red");
  const auto filtered = amr2sg::export_training_pairs({r}, linearize::Strategy::kDfs, true);
  const auto raw = amr2sg::export_training_pairs({r}, linearize::Strategy::kDfs, false);
  CHECK(filtered.pairs[0].target.find("bus") == std::string::npos);
  CHECK(raw.pairs[0].target.find("( bus , red )") != std::string::npos);
  const auto bfs = amr2sg::export_training_pairs({r}, linearize::Strategy::kBfs, true);
  CHECK(bfs.pairs[0].target == filtered.pairs[0].target);
  CHECK(bfs.pairs[0].input != filtered.pairs[0].input);
}
