#pragma once

// Image retrieval by F-score similarity between a query scene graph and the
// region graphs of each image.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sgram/scene_graph.hpp"

namespace sgram::retrieval {

struct Image {
  std::string image_id;
  std::vector<sg::SceneGraph> regions;
};

class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  // Throws ErrorCode::kInvalidArgument on duplicate ids or region-less
  // images.
  explicit RetrievalIndex(std::vector<Image> images);

  const std::vector<Image>& images() const { return images_; }
  std::size_t size() const { return images_.size(); }
  bool contains(const std::string& image_id) const;

  // {"image_id": ..., "regions": [<scene graph JSON>, ...]} per line.
  std::string to_jsonl() const;

 private:
  std::vector<Image> images_;
  std::map<std::string, std::size_t> by_id_;
};

// Throws ErrorCode::kParse with the 1-based line number in the message.
RetrievalIndex read_index(std::istream& in);
// Throws ErrorCode::kFileNotFound.
RetrievalIndex load_index(const std::filesystem::path& path);

// Best F1 over the image's regions. An image without regions scores 0.
double score_image(const sg::SceneGraph& query,
                   const std::vector<sg::SceneGraph>& regions);

struct RankedResult {
  std::string query_id;
  // Non-increasing score; ties by ascending image id.
  std::vector<std::pair<std::string, double>> ranking;
  std::string gold_image_id;
  std::size_t gold_rank = 0;  // 1-based
};

// Throws ErrorCode::kUnknownGoldImage, or kInvalidArgument on an empty index.
RankedResult rank(const sg::SceneGraph& query, const RetrievalIndex& index,
                  const std::string& gold_image_id,
                  const std::string& query_id = {});

struct Metrics {
  std::map<std::size_t, double> recall_at;  // k -> fraction in [0,1]
  std::size_t median_rank = 0;
  std::size_t queries = 0;

  // {"recall_at": {"5": 0.5, ...}, "median_rank": 2, "queries": 4}
  nlohmann::ordered_json to_json() const;
};

// Median of an even count takes the lower middle rank. Throws
// ErrorCode::kEmptyResults.
Metrics aggregate_metrics(const std::vector<std::size_t>& gold_ranks,
                          const std::vector<std::size_t>& ks);
Metrics aggregate_metrics(const std::vector<RankedResult>& results,
                          const std::vector<std::size_t>& ks);

}  // namespace sgram::retrieval
