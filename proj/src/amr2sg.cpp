#include "sgram/amr2sg.hpp"

#include <algorithm>

#include "sgram/error.hpp"

namespace sgram::amr2sg {

namespace {

using amr::Edge;
using amr::Graph;

bool valid_role(const std::string& role) {
  return role.size() >= 2 && role[0] == ':';
}

struct Child {
  const Edge* edge;
  std::size_t preference;  // index in core_roles, or core_roles.size()
};

// Terms that do not survive normalization are left out; the converter
// never fails on a valid graph.
template <typename F>
void try_add(F&& add) {
  try {
    add();
  } catch (const Error&) {
  }
}

class RuleConverter {
 public:
  RuleConverter(const Graph& graph, const RuleConfig& config)
      : graph_(graph), config_(config) {}

  sg::SceneGraph run() {
    for (const auto& node : graph_.nodes()) {
      if (is_object(node.variable)) {
        try_add([&] { out_.add_object(node.concept_label); });
      }
    }
    for (const auto& edge : graph_.edges()) attribute_edge(edge);
    for (const auto& node : graph_.nodes()) {
      if (amr::is_frame(node.concept_label)) frame(node);
    }
    return std::move(out_);
  }

 private:
  bool non_frame(const std::string& variable) const {
    const auto* node = graph_.find(variable);
    return node != nullptr && !amr::is_frame(node->concept_label);
  }

  bool is_attribute_role(const std::string& role) const {
    return config_.attribute_roles.contains(role);
  }

  // Non-frame concept reached only through attribute edges from non-frame
  // concepts, e.g. "gold" in (retriever :mod (gold)).
  bool is_modifier(const std::string& variable) const {
    bool incoming = false;
    for (const auto& e : graph_.edges()) {
      if (!e.targets_variable() || e.target_variable() != variable) continue;
      incoming = true;
      if (!is_attribute_role(e.role) || !non_frame(e.source)) return false;
    }
    return incoming;
  }

  bool is_object(const std::string& variable) const {
    return non_frame(variable) && !is_modifier(variable);
  }

  void attribute_edge(const Edge& edge) {
    if (!is_attribute_role(edge.role) || !is_object(edge.source)) return;
    const auto& object = graph_.concept_of(edge.source);
    if (!edge.targets_variable()) {
      const auto surface = std::get<amr::Constant>(edge.target).surface();
      try_add([&] { out_.add_attribute(object, surface); });
    } else if (non_frame(edge.target_variable())) {
      const auto& attribute = graph_.concept_of(edge.target_variable());
      try_add([&] { out_.add_attribute(object, attribute); });
    }
  }

  std::size_t core_preference(const std::string& role) const {
    const auto& core = config_.core_roles;
    return static_cast<std::size_t>(
        std::find(core.begin(), core.end(), role) - core.begin());
  }

  void frame(const amr::Node& node) {
    std::vector<Child> core;
    std::vector<const Edge*> locative;
    for (const auto& edge : graph_.edges()) {
      if (edge.source != node.variable || !edge.targets_variable() ||
          !is_object(edge.target_variable())) {
        continue;
      }
      const std::size_t pref = core_preference(edge.role);
      if (pref < config_.core_roles.size()) {
        core.push_back({&edge, pref});
      } else if (config_.locative_roles.contains(edge.role)) {
        locative.push_back(&edge);
      }
    }
    if (core.empty()) return;
    std::stable_sort(core.begin(), core.end(),
                     [](const Child& a, const Child& b) {
                       return a.preference < b.preference;
                     });

    const std::string lemma = amr::frame_lemma(node.concept_label);
    const auto& subject = graph_.concept_of(core[0].edge->target_variable());
    if (core.size() + locative.size() < 2) {
      try_add([&] { out_.add_attribute(subject, lemma); });
      return;
    }

    const Edge* object_edge = nullptr;
    std::string predicate = lemma;
    if (core.size() >= 2) {
      object_edge = core[1].edge;
      if (object_edge->role == config_.locative_fallback_role &&
          core[0].preference != 0) {
        predicate += " " + config_.locative_fallback_preposition;
      }
    } else {
      object_edge = locative.front();
      predicate += " " + config_.locative_roles.at(object_edge->role);
    }
    const auto& object = graph_.concept_of(object_edge->target_variable());
    try_add([&] { out_.add_relation(subject, predicate, object); });
  }

  const Graph& graph_;
  const RuleConfig& config_;
  sg::SceneGraph out_;
};

}  // namespace

void RuleConfig::check() const {
  auto bad = [](const std::string& role) {
    throw Error(ErrorCode::kInvalidArgument,
                "role label '" + role + "' must start with ':'");
  };
  for (const auto& r : attribute_roles) {
    if (!valid_role(r)) bad(r);
  }
  for (const auto& r : core_roles) {
    if (!valid_role(r)) bad(r);
  }
  for (const auto& [r, prep] : locative_roles) {
    if (!valid_role(r)) bad(r);
  }
  if (!locative_fallback_role.empty() && !valid_role(locative_fallback_role)) {
    bad(locative_fallback_role);
  }
}

sg::SceneGraph convert_rules(const Graph& graph, const RuleConfig& config) {
  return RuleConverter(graph, config).run();
}

std::string TrainingPair::to_json_line() const {
  nlohmann::ordered_json j;
  j["input"] = input;
  j["target"] = target;
  j["region_id"] = region_id;
  j["strategy"] = std::string(linearize::strategy_name(strategy));
  return j.dump();
}

ExportResult export_training_pairs(
    const std::vector<corpus::RegionRecord>& records,
    linearize::Strategy strategy, bool filter) {
  ExportResult result;
  for (const auto& record : records) {
    if (!record.amr || record.amr->find_first_not_of(" \t\r\n") ==
                           std::string::npos) {
      result.warnings.push_back({record.region_id, "record has no AMR graph"});
      continue;
    }
    amr::Graph graph;
    try {
      graph = amr::parse_penman(*record.amr);
    } catch (const Error& e) {
      result.warnings.push_back(
          {record.region_id, std::string("AMR does not parse: ") + e.what()});
      continue;
    }
    const auto& truth = filter ? corpus::filter_ungrounded(record).ground_truth
                               : record.ground_truth;
    result.pairs.push_back({record.region_id, strategy,
                            linearize::linearize(graph, strategy).text,
                            sg::serialize_sg(truth)});
  }
  return result;
}

}  // namespace sgram::amr2sg
