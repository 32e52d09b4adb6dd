#pragma once

// SPICE-style tuple F-score with one-to-one matching.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sgram/scene_graph.hpp"

namespace sgram::eval {

using Compatibility = std::function<bool(const sg::Tuple&, const sg::Tuple&)>;

// Same arity and identical fields.
bool exact_match(const sg::Tuple& a, const sg::Tuple& b);

// (generated index, reference index)
using Match = std::pair<std::size_t, std::size_t>;

// Maximum-cardinality one-to-one matching by augmenting paths. Generated
// tuples are tried in index order and each tries reference tuples in index
// order, so the result is deterministic. Sorted by generated index.
std::vector<Match> match_tuples(const std::vector<sg::Tuple>& generated,
                                const std::vector<sg::Tuple>& reference,
                                const Compatibility& compatible = exact_match);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<Match> matches;
  std::size_t generated_size = 0;
  std::size_t reference_size = 0;
};

// Both graphs empty scores 1 throughout; exactly one empty scores 0.
EvalReport f_score(const sg::SceneGraph& generated,
                   const sg::SceneGraph& reference,
                   const Compatibility& compatible = exact_match);

struct RegionPair {
  std::string region_id;
  sg::SceneGraph generated;
  sg::SceneGraph reference;
};

struct CorpusReport {
  double mean_f1 = 0.0;
  // Ordered by region id.
  std::vector<std::pair<std::string, EvalReport>> per_region;
  std::size_t region_count = 0;

  // One JSON line per region when `per_region`, then a summary line.
  std::string to_jsonl(bool per_region) const;
};

// Throws ErrorCode::kEmptyCorpus.
CorpusReport evaluate_corpus(const std::vector<RegionPair>& pairs,
                             const Compatibility& compatible = exact_match);

}  // namespace sgram::eval
