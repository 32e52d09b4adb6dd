#pragma once

// Scene graphs as tuple multisets, plus their target-string and JSON forms.
//
// Target grammar (one group per tuple, groups separated by one space):
//   ( object )  ( object , attribute )  ( subject , predicate , object )
// Sections are written objects, attributes, relations, each sorted
// lexicographically.

#include <array>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sgram::sg {

// Lowercase, collapse whitespace, trim, drop leading articles (a lone
// article is kept). Idempotent.
// Throws ErrorCode::kEmptyAfterNormalization or kReservedCharacter ("(", ")"
// and "," cannot appear in a term).
std::string normalize(std::string_view term);

struct ObjectTuple {
  std::string name;
  friend auto operator<=>(const ObjectTuple&, const ObjectTuple&) = default;
};

struct AttributeTuple {
  std::string object;
  std::string attribute;
  friend auto operator<=>(const AttributeTuple&, const AttributeTuple&) = default;
};

struct RelationTuple {
  std::string subject;
  std::string predicate;
  std::string object;
  friend auto operator<=>(const RelationTuple&, const RelationTuple&) = default;
};

// Arity-tagged tuple. Tuples of different arity never compare equal.
struct Tuple {
  std::size_t arity = 1;
  std::array<std::string, 3> fields;

  friend auto operator<=>(const Tuple&, const Tuple&) = default;
  std::string to_string() const;
};

class SceneGraph {
 public:
  SceneGraph() = default;

  // Terms are normalized. Endpoints of attributes and relations are added
  // as objects when no object of that name exists yet.
  void add_object(std::string_view name);
  void add_attribute(std::string_view object, std::string_view attribute);
  void add_relation(std::string_view subject, std::string_view predicate,
                    std::string_view object);

  const std::vector<ObjectTuple>& objects() const { return objects_; }
  const std::vector<AttributeTuple>& attributes() const { return attributes_; }
  const std::vector<RelationTuple>& relations() const { return relations_; }

  bool empty() const {
    return objects_.empty() && attributes_.empty() && relations_.empty();
  }
  std::size_t tuple_count() const {
    return objects_.size() + attributes_.size() + relations_.size();
  }
  bool has_object(std::string_view name) const;

  // Multiset equality, independent of insertion order.
  bool same_tuples(const SceneGraph& other) const;

 private:
  void ensure_object(const std::string& normalized);

  std::vector<ObjectTuple> objects_;
  std::vector<AttributeTuple> attributes_;
  std::vector<RelationTuple> relations_;
};

std::string serialize_sg(const SceneGraph& sg);

// Throws ErrorCode::kBadArity or kUnbalancedParentheses.
SceneGraph parse_sg_text(std::string_view text);

// Objects, then attributes, then relations, each in stored order.
std::vector<Tuple> to_tuples(const SceneGraph& sg);

// {"objects": [["dog"]], "attributes": [["dog","brown"]],
//  "relations": [["dog","on","grass"]]}
nlohmann::json to_json(const SceneGraph& sg);
// Accepts bare strings for objects as well. Throws ErrorCode::kParse.
SceneGraph from_json(const nlohmann::json& j);

}  // namespace sgram::sg
