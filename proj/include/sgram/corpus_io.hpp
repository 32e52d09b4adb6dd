#pragma once

// Region records: loading, grounding filter, statistics, and the Visual
// Genome region-graph converter.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgram/scene_graph.hpp"

namespace sgram::corpus {

struct RegionRecord {
  std::string image_id;
  std::string region_id;
  std::string description;
  sg::SceneGraph ground_truth;
  std::optional<std::string> amr;  // PENMAN text
};

struct LineError {
  std::size_t line = 0;  // 1-based line; region ordinal for Visual Genome
  std::string message;
};

struct LoadResult {
  std::vector<RegionRecord> records;
  std::vector<LineError> errors;

  std::size_t skipped() const { return errors.size(); }
};

// Line-delimited JSON with keys image_id, region_id, description,
// scene_graph and optional amr. Ids may be strings or integers. Malformed
// lines are skipped and reported.
LoadResult read_records(std::istream& in);
// Throws ErrorCode::kFileNotFound.
LoadResult load_records(const std::filesystem::path& path);

RegionRecord record_from_json(const nlohmann::json& j);
nlohmann::ordered_json record_to_json(const RegionRecord& record);
std::string record_to_line(const RegionRecord& record);

// Drops tuples whose head object shares no token with the description.
// Attributes and relations that touch a dropped object go with it.
RegionRecord filter_ungrounded(const RegionRecord& record);

// True when some word of `name` matches some word of `description` after
// normalization and suffix stemming.
bool is_grounded(const std::string& name, const std::string& description);

struct CorpusStats {
  std::size_t images = 0;
  std::size_t regions = 0;
  double mean_regions_per_image = 0.0;
  std::size_t objects = 0;
  std::size_t attributes = 0;
  std::size_t relations = 0;
  std::size_t with_amr = 0;
  // tuples-per-region value -> number of regions
  std::map<std::size_t, std::size_t> objects_per_region;
  std::map<std::size_t, std::size_t> attributes_per_region;
  std::map<std::size_t, std::size_t> relations_per_region;

  nlohmann::ordered_json to_json() const;
};

CorpusStats corpus_stats(const std::vector<RegionRecord>& records);

// Visual Genome region_graphs.json layout: an array of images, each with
// "image_id" and "regions"; each region carries "region_id", "phrase",
// "objects" (name/names, optional attributes), optional "attributes" and
// "relationships" (subject_id, predicate, object_id).
LoadResult from_visual_genome(const nlohmann::json& images);

}  // namespace sgram::corpus
