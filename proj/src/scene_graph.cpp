#include "sgram/scene_graph.hpp"

#include <algorithm>
#include <cctype>

#include "sgram/error.hpp"

namespace sgram::sg {

namespace {

bool is_article(std::string_view word) {
  return word == "a" || word == "an" || word == "the";
}

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string field_from_json(const nlohmann::json& j, const char* section) {
  if (!j.is_string()) {
    throw Error(ErrorCode::kParse,
                std::string("non-string field in \"") + section + "\"");
  }
  return j.get<std::string>();
}

std::vector<std::string> group_from_json(const nlohmann::json& j,
                                         const char* section,
                                         std::size_t arity) {
  if (j.is_string() && arity == 1) return {j.get<std::string>()};
  if (!j.is_array() || j.size() != arity) {
    throw Error(ErrorCode::kParse, std::string("entry of \"") + section +
                                       "\" must be an array of " +
                                       std::to_string(arity) + " strings");
  }
  std::vector<std::string> out;
  for (const auto& f : j) out.push_back(field_from_json(f, section));
  return out;
}

}  // namespace

std::string normalize(std::string_view term) {
  std::vector<std::string> words;
  std::string current;
  for (char c : term) {
    if (c == '(' || c == ')' || c == ',') {
      throw Error(ErrorCode::kReservedCharacter,
                  "term '" + std::string(term) + "' contains '" +
                      std::string(1, c) + "'");
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
      continue;
    }
    current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (!current.empty()) words.push_back(std::move(current));
  while (words.size() > 1 && is_article(words.front())) {
    words.erase(words.begin());
  }
  if (words.empty()) {
    throw Error(ErrorCode::kEmptyAfterNormalization,
                "term '" + std::string(term) + "' is empty after normalization");
  }
  std::string out = words.front();
  for (std::size_t i = 1; i < words.size(); ++i) {
    out += ' ';
    out += words[i];
  }
  return out;
}

std::string Tuple::to_string() const {
  std::string out = "( ";
  for (std::size_t i = 0; i < arity; ++i) {
    if (i > 0) out += " , ";
    out += fields[i];
  }
  return out + " )";
}

bool SceneGraph::has_object(std::string_view name) const {
  return std::any_of(objects_.begin(), objects_.end(),
                     [&](const ObjectTuple& o) { return o.name == name; });
}

void SceneGraph::ensure_object(const std::string& normalized) {
  if (!has_object(normalized)) objects_.push_back({normalized});
}

void SceneGraph::add_object(std::string_view name) {
  objects_.push_back({normalize(name)});
}

void SceneGraph::add_attribute(std::string_view object,
                               std::string_view attribute) {
  AttributeTuple t{normalize(object), normalize(attribute)};
  ensure_object(t.object);
  attributes_.push_back(std::move(t));
}

void SceneGraph::add_relation(std::string_view subject,
                              std::string_view predicate,
                              std::string_view object) {
  RelationTuple t{normalize(subject), normalize(predicate), normalize(object)};
  ensure_object(t.subject);
  ensure_object(t.object);
  relations_.push_back(std::move(t));
}

bool SceneGraph::same_tuples(const SceneGraph& other) const {
  return sorted(objects_) == sorted(other.objects_) &&
         sorted(attributes_) == sorted(other.attributes_) &&
         sorted(relations_) == sorted(other.relations_);
}

std::string serialize_sg(const SceneGraph& sg) {
  std::vector<std::string> groups;
  for (const auto& o : sorted(sg.objects())) {
    groups.push_back("( " + o.name + " )");
  }
  for (const auto& a : sorted(sg.attributes())) {
    groups.push_back("( " + a.object + " , " + a.attribute + " )");
  }
  for (const auto& r : sorted(sg.relations())) {
    groups.push_back("( " + r.subject + " , " + r.predicate + " , " +
                     r.object + " )");
  }
  std::string out;
  for (const auto& g : groups) {
    if (!out.empty()) out += ' ';
    out += g;
  }
  return out;
}

SceneGraph parse_sg_text(std::string_view text) {
  SceneGraph sg;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    if (c == ')') {
      throw Error(ErrorCode::kUnbalancedParentheses, "unexpected ')'", pos);
    }
    if (c != '(') {
      throw Error(ErrorCode::kSyntax, "text outside a tuple group", pos);
    }
    const std::size_t open = pos++;
    const std::size_t close = text.find_first_of("()", pos);
    if (close == std::string_view::npos || text[close] == '(') {
      throw Error(ErrorCode::kUnbalancedParentheses, "unclosed '('", open);
    }
    std::vector<std::string_view> fields;
    std::string_view body = text.substr(pos, close - pos);
    for (;;) {
      const auto comma = body.find(',');
      fields.push_back(body.substr(0, comma));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    const bool blank = std::any_of(fields.begin(), fields.end(), [](auto f) {
      return f.find_first_not_of(" \t\r\n") == std::string_view::npos;
    });
    if (fields.size() > 3 || blank) {
      throw Error(ErrorCode::kBadArity,
                  "tuple group with " +
                      std::to_string(blank ? 0 : fields.size()) +
                      " usable fields",
                  open);
    }
    switch (fields.size()) {
      case 1: sg.add_object(fields[0]); break;
      case 2: sg.add_attribute(fields[0], fields[1]); break;
      default: sg.add_relation(fields[0], fields[1], fields[2]); break;
    }
    pos = close + 1;
  }
  return sg;
}

std::vector<Tuple> to_tuples(const SceneGraph& sg) {
  std::vector<Tuple> out;
  out.reserve(sg.tuple_count());
  for (const auto& o : sg.objects()) out.push_back({1, {o.name, "", ""}});
  for (const auto& a : sg.attributes()) {
    out.push_back({2, {a.object, a.attribute, ""}});
  }
  for (const auto& r : sg.relations()) {
    out.push_back({3, {r.subject, r.predicate, r.object}});
  }
  return out;
}

nlohmann::json to_json(const SceneGraph& sg) {
  nlohmann::json objects = nlohmann::json::array();
  nlohmann::json attributes = nlohmann::json::array();
  nlohmann::json relations = nlohmann::json::array();
  for (const auto& o : sg.objects()) {
    objects.push_back(nlohmann::json::array({o.name}));
  }
  for (const auto& a : sg.attributes()) {
    attributes.push_back(nlohmann::json::array({a.object, a.attribute}));
  }
  for (const auto& r : sg.relations()) {
    relations.push_back(
        nlohmann::json::array({r.subject, r.predicate, r.object}));
  }
  nlohmann::json out = nlohmann::json::object();
  out["objects"] = std::move(objects);
  out["attributes"] = std::move(attributes);
  out["relations"] = std::move(relations);
  return out;
}

SceneGraph from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParse, "scene graph must be a JSON object");
  }
  auto section = [&](const char* key) -> const nlohmann::json* {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return nullptr;
    if (!it->is_array()) {
      throw Error(ErrorCode::kParse,
                  std::string("\"") + key + "\" must be an array");
    }
    return &*it;
  };
  SceneGraph sg;
  if (const auto* objects = section("objects")) {
    for (const auto& e : *objects) {
      sg.add_object(group_from_json(e, "objects", 1)[0]);
    }
  }
  if (const auto* attributes = section("attributes")) {
    for (const auto& e : *attributes) {
      auto f = group_from_json(e, "attributes", 2);
      sg.add_attribute(f[0], f[1]);
    }
  }
  if (const auto* relations = section("relations")) {
    for (const auto& e : *relations) {
      auto f = group_from_json(e, "relations", 3);
      sg.add_relation(f[0], f[1], f[2]);
    }
  }
  return sg;
}

}  // namespace sgram::sg
