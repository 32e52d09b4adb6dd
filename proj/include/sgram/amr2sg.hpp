#pragma once

// Scene graphs from AMR graphs: a deterministic rule baseline and the
// training-pair export consumed by external seq2seq models.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sgram/amr.hpp"
#include "sgram/corpus_io.hpp"
#include "sgram/linearize.hpp"
#include "sgram/scene_graph.hpp"

namespace sgram::amr2sg {

struct RuleConfig {
  // Edges treated as object modifiers.
  std::set<std::string> attribute_roles{":mod"};
  // Relation endpoints, most preferred first.
  std::vector<std::string> core_roles{":ARG0", ":ARG1", ":ARG2"};
  // Role -> preposition appended to the predicate.
  std::map<std::string, std::string> locative_roles{{":location", "in"}};
  // Core role that reads as locative when it supplies the relation object
  // and the subject did not come from the first core role
  // ("retriever stand in snow").
  std::string locative_fallback_role = ":ARG2";
  std::string locative_fallback_preposition = "in";

  // Throws ErrorCode::kInvalidArgument on labels without a leading ':'.
  void check() const;
};

// 1. non-frame concepts become objects, except pure modifiers;
// 2. attribute-role edges from an object to a non-frame concept or constant
//    become attributes;
// 3. frames with a core child and at least two core/locative children become
//    relations (subject = best core child, object = next core child, else
//    first locative child);
// 4. frames with exactly one core child and nothing else become an attribute
//    of that child;
// 5. other frames are dropped.
sg::SceneGraph convert_rules(const amr::Graph& graph,
                             const RuleConfig& config = {});

struct TrainingPair {
  std::string region_id;
  linearize::Strategy strategy;
  std::string input;
  std::string target;

  // {"input", "target", "region_id", "strategy"}
  std::string to_json_line() const;
};

struct ExportWarning {
  std::string region_id;
  std::string message;
};

struct ExportResult {
  std::vector<TrainingPair> pairs;
  std::vector<ExportWarning> warnings;

  std::size_t skipped() const { return warnings.size(); }
};

// Records without an AMR, or with one that fails to parse, are skipped with
// a warning. Ground truth passes through filter_ungrounded when `filter`.
ExportResult export_training_pairs(
    const std::vector<corpus::RegionRecord>& records,
    linearize::Strategy strategy, bool filter = true);

}  // namespace sgram::amr2sg
