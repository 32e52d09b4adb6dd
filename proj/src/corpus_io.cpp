#include "sgram/corpus_io.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <unordered_map>

#include "sgram/error.hpp"

namespace sgram::corpus {

namespace {

std::string id_from_json(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::kParse, std::string("missing \"") + key + "\"");
  }
  std::string id;
  if (it->is_string()) {
    id = it->get<std::string>();
  } else if (it->is_number_integer()) {
    id = it->dump();
  } else {
    throw Error(ErrorCode::kParse,
                std::string("\"") + key + "\" must be a string or integer");
  }
  if (id.empty()) {
    throw Error(ErrorCode::kParse, std::string("\"") + key + "\" is empty");
  }
  return id;
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      current += static_cast<char>(std::tolower(u));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// The word plus every form with a final "s", "es" or "ing" removed, keeping
// at least two characters.
std::vector<std::string> stems(const std::string& word) {
  std::vector<std::string> out{word};
  for (std::string_view suffix : {"s", "es", "ing"}) {
    if (ends_with(word, suffix) && word.size() >= suffix.size() + 2) {
      out.push_back(word.substr(0, word.size() - suffix.size()));
    }
  }
  return out;
}

std::set<std::string> stem_set(std::string_view text) {
  std::set<std::string> out;
  for (const auto& w : words(text)) {
    for (auto& s : stems(w)) out.insert(std::move(s));
  }
  return out;
}

const nlohmann::json* array_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  if (!it->is_array()) {
    throw Error(ErrorCode::kParse, std::string("\"") + key + "\" must be an array");
  }
  return &*it;
}

std::string vg_object_name(const nlohmann::json& obj) {
  if (auto it = obj.find("name"); it != obj.end() && it->is_string()) {
    return it->get<std::string>();
  }
  if (auto it = obj.find("names");
      it != obj.end() && it->is_array() && !it->empty() &&
      it->front().is_string()) {
    return it->front().get<std::string>();
  }
  throw Error(ErrorCode::kParse, "object without a name");
}

std::vector<std::string> vg_attribute_values(const nlohmann::json& entry) {
  std::vector<std::string> out;
  for (const char* key : {"attribute", "attributes"}) {
    auto it = entry.find(key);
    if (it == entry.end()) continue;
    if (it->is_string()) {
      out.push_back(it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& a : *it) {
        if (a.is_string()) out.push_back(a.get<std::string>());
      }
    }
  }
  return out;
}

RegionRecord vg_region(const nlohmann::json& region,
                       const std::string& image_id) {
  RegionRecord record;
  record.image_id = region.contains("image_id")
                        ? id_from_json(region, "image_id")
                        : image_id;
  record.region_id = id_from_json(region, "region_id");
  for (const char* key : {"phrase", "description"}) {
    if (auto it = region.find(key); it != region.end() && it->is_string()) {
      record.description = it->get<std::string>();
      break;
    }
  }
  if (record.description.empty()) {
    throw Error(ErrorCode::kParse, "region without a phrase");
  }

  std::unordered_map<std::string, std::string> names;  // object_id -> name
  auto remember = [&](const nlohmann::json& obj) {
    if (obj.contains("object_id")) {
      names[id_from_json(obj, "object_id")] = vg_object_name(obj);
    }
  };
  auto& sg = record.ground_truth;
  if (const auto* objects = array_field(region, "objects")) {
    for (const auto& obj : *objects) {
      const auto name = vg_object_name(obj);
      sg.add_object(name);
      remember(obj);
      for (const auto& a : vg_attribute_values(obj)) sg.add_attribute(name, a);
    }
  }
  auto resolve = [&](const nlohmann::json& rel, const char* id_key,
                     const char* embedded_key) {
    if (auto it = rel.find(embedded_key); it != rel.end() && it->is_object()) {
      remember(*it);
      return vg_object_name(*it);
    }
    const auto id = id_from_json(rel, id_key);
    auto found = names.find(id);
    if (found == names.end()) {
      throw Error(ErrorCode::kParse, "relationship refers to unknown object " + id);
    }
    return found->second;
  };
  if (const auto* attributes = array_field(region, "attributes")) {
    for (const auto& entry : *attributes) {
      const auto name = resolve(entry, "object_id", "object");
      for (const auto& a : vg_attribute_values(entry)) sg.add_attribute(name, a);
    }
  }
  if (const auto* relationships = array_field(region, "relationships")) {
    for (const auto& rel : *relationships) {
      const auto subject = resolve(rel, "subject_id", "subject");
      const auto object = resolve(rel, "object_id", "object");
      auto it = rel.find("predicate");
      if (it == rel.end() || !it->is_string()) {
        throw Error(ErrorCode::kParse, "relationship without a predicate");
      }
      sg.add_relation(subject, it->get<std::string>(), object);
    }
  }
  return record;
}

}  // namespace

RegionRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "record must be an object");
  RegionRecord record;
  record.image_id = id_from_json(j, "image_id");
  record.region_id = id_from_json(j, "region_id");
  auto desc = j.find("description");
  if (desc == j.end() || !desc->is_string() ||
      desc->get<std::string>().find_first_not_of(" \t\r\n") ==
          std::string::npos) {
    throw Error(ErrorCode::kParse, "missing or empty \"description\"");
  }
  record.description = desc->get<std::string>();
  auto graph = j.find("scene_graph");
  if (graph == j.end()) throw Error(ErrorCode::kParse, "missing \"scene_graph\"");
  record.ground_truth = sg::from_json(*graph);
  if (auto amr = j.find("amr"); amr != j.end() && !amr->is_null()) {
    if (!amr->is_string()) throw Error(ErrorCode::kParse, "\"amr\" must be a string");
    record.amr = amr->get<std::string>();
  }
  return record;
}

nlohmann::ordered_json record_to_json(const RegionRecord& record) {
  nlohmann::ordered_json j;
  j["image_id"] = record.image_id;
  j["region_id"] = record.region_id;
  j["description"] = record.description;
  const auto graph = sg::to_json(record.ground_truth);
  j["scene_graph"] = nlohmann::ordered_json::object();
  for (const char* key : {"objects", "attributes", "relations"}) {
    j["scene_graph"][key] = graph.at(key);
  }
  if (record.amr) j["amr"] = *record.amr;
  return j;
}

std::string record_to_line(const RegionRecord& record) {
  return record_to_json(record).dump();
}

LoadResult read_records(std::istream& in) {
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

LoadResult load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound,
                "cannot open corpus '" + path.string() + "'");
  }
  return read_records(in);
}

bool is_grounded(const std::string& name, const std::string& description) {
  const auto described = stem_set(description);
  for (const auto& w : words(name)) {
    for (const auto& s : stems(w)) {
      if (described.contains(s)) return true;
    }
  }
  return false;
}

RegionRecord filter_ungrounded(const RegionRecord& record) {
  RegionRecord out = record;
  out.ground_truth = sg::SceneGraph{};
  const auto& truth = record.ground_truth;

  std::unordered_map<std::string, bool> grounded;
  auto keep = [&](const std::string& name) {
    auto [it, inserted] = grounded.try_emplace(name, false);
    if (inserted) it->second = is_grounded(name, record.description);
    return it->second;
  };
  for (const auto& o : truth.objects()) {
    if (keep(o.name)) out.ground_truth.add_object(o.name);
  }
  for (const auto& a : truth.attributes()) {
    if (keep(a.object)) out.ground_truth.add_attribute(a.object, a.attribute);
  }
  for (const auto& r : truth.relations()) {
    if (keep(r.subject) && keep(r.object)) {
      out.ground_truth.add_relation(r.subject, r.predicate, r.object);
    }
  }
  return out;
}

nlohmann::ordered_json CorpusStats::to_json() const {
  auto histogram = [](const std::map<std::size_t, std::size_t>& h) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  nlohmann::ordered_json j;
  j["images"] = images;
  j["regions"] = regions;
  j["mean_regions_per_image"] = mean_regions_per_image;
  j["objects"] = objects;
  j["attributes"] = attributes;
  j["relations"] = relations;
  j["with_amr"] = with_amr;
  j["objects_per_region"] = histogram(objects_per_region);
  j["attributes_per_region"] = histogram(attributes_per_region);
  j["relations_per_region"] = histogram(relations_per_region);
  return j;
}

CorpusStats corpus_stats(const std::vector<RegionRecord>& records) {
  CorpusStats stats;
  std::set<std::string> images;
  for (const auto& r : records) {
    images.insert(r.image_id);
    const auto& g = r.ground_truth;
    stats.objects += g.objects().size();
    stats.attributes += g.attributes().size();
    stats.relations += g.relations().size();
    ++stats.objects_per_region[g.objects().size()];
    ++stats.attributes_per_region[g.attributes().size()];
    ++stats.relations_per_region[g.relations().size()];
    if (r.amr) ++stats.with_amr;
  }
  stats.images = images.size();
  stats.regions = records.size();
  if (stats.images > 0) {
    stats.mean_regions_per_image = static_cast<double>(stats.regions) /
                                   static_cast<double>(stats.images);
  }
  return stats;
}

LoadResult from_visual_genome(const nlohmann::json& images) {
  LoadResult result;
  if (!images.is_array()) {
    throw Error(ErrorCode::kParse, "expected an array of images");
  }
  std::size_t ordinal = 0;
  for (const auto& image : images) {
    std::string image_id;
    const nlohmann::json* regions = nullptr;
    try {
      image_id = id_from_json(image, "image_id");
      regions = array_field(image, "regions");
    } catch (const std::exception& e) {
      result.errors.push_back({++ordinal, e.what()});
      continue;
    }
    if (regions == nullptr) continue;
    for (const auto& region : *regions) {
      ++ordinal;
      try {
        result.records.push_back(vg_region(region, image_id));
      } catch (const std::exception& e) {
        result.errors.push_back({ordinal, e.what()});
      }
    }
  }
  return result;
}

}  // namespace sgram::corpus
