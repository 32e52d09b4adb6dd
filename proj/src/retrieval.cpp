#include "sgram/retrieval.hpp"

#include <algorithm>
#include <fstream>

#include "sgram/error.hpp"
#include "sgram/spice_eval.hpp"

namespace sgram::retrieval {

RetrievalIndex::RetrievalIndex(std::vector<Image> images)
    : images_(std::move(images)) {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const auto& img = images_[i];
    if (img.image_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "image with an empty id");
    }
    if (img.regions.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "image '" + img.image_id + "' has no region graphs");
    }
    if (!by_id_.emplace(img.image_id, i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate image id '" + img.image_id + "'");
    }
  }
}

bool RetrievalIndex::contains(const std::string& image_id) const {
  return by_id_.contains(image_id);
}

std::string RetrievalIndex::to_jsonl() const {
  std::string out;
  for (const auto& img : images_) {
    nlohmann::ordered_json j;
    j["image_id"] = img.image_id;
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& r : img.regions) regions.push_back(sg::to_json(r));
    j["regions"] = std::move(regions);
    out += j.dump();
    out += '\n';
  }
  return out;
}

RetrievalIndex read_index(std::istream& in) {
  std::vector<Image> images;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Image img;
      const auto& id = j.at("image_id");
      img.image_id = id.is_string() ? id.get<std::string>() : id.dump();
      for (const auto& r : j.at("regions")) {
        img.regions.push_back(sg::from_json(r));
      }
      images.push_back(std::move(img));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, "index line " + std::to_string(line_no) +
                                         ": " + e.what());
    }
  }
  return RetrievalIndex(std::move(images));
}

RetrievalIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound,
                "cannot open index '" + path.string() + "'");
  }
  return read_index(in);
}

double score_image(const sg::SceneGraph& query,
                   const std::vector<sg::SceneGraph>& regions) {
  double best = 0.0;
  for (const auto& region : regions) {
    best = std::max(best, eval::f_score(query, region).f1);
  }
  return best;
}

RankedResult rank(const sg::SceneGraph& query, const RetrievalIndex& index,
                  const std::string& gold_image_id,
                  const std::string& query_id) {
  if (index.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "retrieval index is empty");
  }
  if (!index.contains(gold_image_id)) {
    throw Error(ErrorCode::kUnknownGoldImage,
                "gold image '" + gold_image_id + "' is not in the index");
  }
  RankedResult result;
  result.query_id = query_id;
  result.gold_image_id = gold_image_id;
  result.ranking.reserve(index.size());
  for (const auto& img : index.images()) {
    result.ranking.emplace_back(img.image_id, score_image(query, img.regions));
  }
  std::sort(result.ranking.begin(), result.ranking.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  for (std::size_t i = 0; i < result.ranking.size(); ++i) {
    if (result.ranking[i].first == gold_image_id) {
      result.gold_rank = i + 1;
      break;
    }
  }
  return result;
}

nlohmann::ordered_json Metrics::to_json() const {
  nlohmann::ordered_json j;
  j["recall_at"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : recall_at) j["recall_at"][std::to_string(k)] = v;
  j["median_rank"] = median_rank;
  j["queries"] = queries;
  return j;
}

Metrics aggregate_metrics(const std::vector<std::size_t>& gold_ranks,
                          const std::vector<std::size_t>& ks) {
  if (gold_ranks.empty()) {
    throw Error(ErrorCode::kEmptyResults, "no retrieval results to aggregate");
  }
  Metrics m;
  m.queries = gold_ranks.size();
  for (std::size_t k : ks) {
    const auto hits = std::count_if(gold_ranks.begin(), gold_ranks.end(),
                                    [k](std::size_t r) { return r <= k; });
    m.recall_at[k] =
        static_cast<double>(hits) / static_cast<double>(gold_ranks.size());
  }
  std::vector<std::size_t> sorted = gold_ranks;
  const std::size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(mid),
                   sorted.end());
  m.median_rank = sorted[mid];
  return m;
}

Metrics aggregate_metrics(const std::vector<RankedResult>& results,
                          const std::vector<std::size_t>& ks) {
  std::vector<std::size_t> ranks;
  ranks.reserve(results.size());
  for (const auto& r : results) ranks.push_back(r.gold_rank);
  return aggregate_metrics(ranks, ks);
}

}  // namespace sgram::retrieval
