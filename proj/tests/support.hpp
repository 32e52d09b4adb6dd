#pragma once

// Test-only generators and independent oracles. Nothing here calls the code
// path it is used to check.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sgram/amr.hpp"
#include "sgram/amr2sg.hpp"
#include "sgram/scene_graph.hpp"

namespace sgram::testing {

inline const char* kRetrieverPenman =
    "(z0 / stand-01 :ARG1 (z1 / retriever :mod (z2 / gold)) :ARG2 (z3 / snow))";
inline const char* kWantPenman =
    "(z0 / want-01 :ARG0 (z1 / dog) :ARG1 (z2 / eat-01 :ARG0 z1))";

// ---- random AMR graphs ----------------------------------------------------

struct GraphShape {
  std::size_t max_nodes = 12;
  std::size_t max_reentrancies = 2;
  bool constants = true;
};

inline amr::Graph random_graph(std::mt19937& rng, const GraphShape& shape) {
  static const std::vector<std::string> kConcepts{
      "dog",   "cat",     "man",   "snow",   "gold",  "retriever", "red",
      "table", "umbrella", "stand-01", "hold-01", "eat-01", "sit-01",
      "want-01", "near-02", "big"};
  static const std::vector<std::string> kRoles{
      ":ARG0", ":ARG1", ":ARG2", ":mod", ":location", ":part", ":ARG0-of"};
  static const std::vector<std::string> kConstants{"-", "2", "\"Paris\"",
                                                   "imperative", "+"};
  auto pick = [&](const auto& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };

  const std::size_t n =
      std::uniform_int_distribution<std::size_t>(1, shape.max_nodes)(rng);
  struct Child {
    std::string role;
    std::size_t target;  // node index, or npos for a constant
    bool tree;
    std::string constant;
  };
  std::vector<std::vector<Child>> children(n);
  std::vector<std::size_t> parent(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    parent[i] = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    children[parent[i]].push_back({pick(kRoles), i, true, {}});
  }
  auto is_ancestor = [&](std::size_t a, std::size_t of) {
    for (std::size_t x = of;; x = parent[x]) {
      if (x == a) return true;
      if (x == 0) return false;
    }
  };
  auto insert_at_random = [&](std::size_t node, Child c) {
    auto& list = children[node];
    const auto pos =
        std::uniform_int_distribution<std::size_t>(0, list.size())(rng);
    list.insert(list.begin() + static_cast<long>(pos), std::move(c));
  };
  const std::size_t reentrancies = std::uniform_int_distribution<std::size_t>(
      0, n > 1 ? shape.max_reentrancies : 0)(rng);
  for (std::size_t k = 0; k < reentrancies; ++k) {
    const auto src = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const auto dst = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    if (is_ancestor(dst, src)) continue;  // keep the graph acyclic
    insert_at_random(src, {pick(kRoles), dst, false, {}});
  }
  if (shape.constants && n > 0 &&
      std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
    const auto src = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    static const std::vector<std::string> kConstantRoles{":polarity", ":mod",
                                                         ":quant"};
    insert_at_random(src, {pick(kConstantRoles), std::string::npos, false,
                           pick(kConstants)});
  }

  std::vector<amr::Node> nodes;
  std::vector<amr::Edge> edges;
  auto var = [](std::size_t i) { return "z" + std::to_string(i); };
  std::vector<std::string> concept_of(n);
  for (auto& c : concept_of) c = pick(kConcepts);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    nodes.push_back({var(i), concept_of[i]});
    for (const auto& c : children[i]) {
      amr::Edge e;
      e.source = var(i);
      e.role = c.role;
      e.tree = c.tree;
      if (c.target == std::string::npos) {
        e.target = amr::Constant{c.constant};
      } else {
        e.target = amr::VariableRef{var(c.target)};
      }
      edges.push_back(e);
      if (c.tree) visit(c.target);
    }
  };
  visit(0);
  return amr::Graph(var(0), std::move(nodes), std::move(edges));
}

// ---- linearization oracles --------------------------------------------------

// DFS/BFS tokens by plain string surgery: fuse " / " and split on spaces.
inline std::vector<std::string> split_tokens_oracle(std::string text) {
  text = std::regex_replace(text, std::regex(" / "), "/");
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

// Node depth over tree edges and the first-visit order of a level-order walk.
inline std::vector<std::string> reference_bfs_order(const amr::Graph& g) {
  std::map<std::string, std::vector<std::string>> kids;
  for (const auto& e : g.edges()) {
    if (e.tree) kids[e.source].push_back(e.target_variable());
  }
  std::vector<std::string> order;
  std::deque<std::string> q{g.root()};
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    order.push_back(v);
    for (const auto& c : kids[v]) q.push_back(c);
  }
  return order;
}

inline std::map<std::string, int> tree_depths(const amr::Graph& g) {
  std::map<std::string, int> depth{{g.root(), 0}};
  for (const auto& v : reference_bfs_order(g)) {
    for (const auto& e : g.edges()) {
      if (e.tree && e.source == v) depth[e.target_variable()] = depth[v] + 1;
    }
  }
  return depth;
}

// ---- scene-graph oracles ----------------------------------------------------

// Independent normalizer: regex based.
inline std::string normalize_oracle(const std::string& raw) {
  std::string s;
  for (char c : raw) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  s = std::regex_replace(s, std::regex("\\s+"), " ");
  s = std::regex_replace(s, std::regex("^ | $"), "");
  std::string prev;
  while (prev != s) {
    prev = s;
    s = std::regex_replace(s, std::regex("^(a|an|the) (?=\\S)"), "");
  }
  return s;
}

using TupleKey = std::vector<std::string>;  // arity = size

inline std::vector<TupleKey> tuple_keys(const sg::SceneGraph& g) {
  std::vector<TupleKey> out;
  for (const auto& o : g.objects()) out.push_back({o.name});
  for (const auto& a : g.attributes()) out.push_back({a.object, a.attribute});
  for (const auto& r : g.relations()) {
    out.push_back({r.subject, r.predicate, r.object});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Size of the multiset intersection.
inline std::size_t multiset_intersection(const std::vector<sg::Tuple>& a,
                                         const std::vector<sg::Tuple>& b) {
  std::map<TupleKey, long> count;
  auto key = [](const sg::Tuple& t) {
    return TupleKey(t.fields.begin(), t.fields.begin() + static_cast<long>(t.arity));
  };
  for (const auto& t : a) ++count[key(t)];
  std::size_t shared = 0;
  for (const auto& t : b) {
    if (count[key(t)]-- > 0) ++shared;
  }
  return shared;
}

// Exhaustive maximum matching for small inputs.
inline std::size_t brute_force_max_matching(const std::vector<sg::Tuple>& g,
                                            const std::vector<sg::Tuple>& r) {
  std::vector<bool> used(r.size(), false);
  std::function<std::size_t(std::size_t)> best = [&](std::size_t i) -> std::size_t {
    if (i == g.size()) return 0;
    std::size_t result = best(i + 1);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (used[j] || g[i].arity != r[j].arity || g[i].fields != r[j].fields) continue;
      used[j] = true;
      result = std::max(result, 1 + best(i + 1));
      used[j] = false;
    }
    return result;
  };
  return best(0);
}

inline sg::SceneGraph random_scene_graph(std::mt19937& rng, std::size_t max_tuples,
                                         std::size_t vocab = 5) {
  static const std::vector<std::string> kWords{
      "dog", "cat", "man", "table", "tree", "red", "big", "on", "near",
      "holding", "grass", "sky", "blue", "car", "wooden"};
  auto word = [&] {
    return kWords[std::uniform_int_distribution<std::size_t>(
        0, std::min(vocab, kWords.size()) - 1)(rng)];
  };
  sg::SceneGraph g;
  const auto n = std::uniform_int_distribution<std::size_t>(0, max_tuples)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: g.add_object(word()); break;
      case 1: g.add_attribute(word(), word()); break;
      default: g.add_relation(word(), word(), word()); break;
    }
  }
  return g;
}

// F1 straight from the counting definition.
inline double f1_oracle(std::size_t matched, std::size_t g, std::size_t r) {
  if (g == 0 && r == 0) return 1.0;
  if (g == 0 || r == 0 || matched == 0) return 0.0;
  return 2.0 * static_cast<double>(matched) / static_cast<double>(g + r);
}

// Brute-force interpreter: every rule is evaluated over the full
// (node, edge) product with no shared state between rules.
inline std::vector<TupleKey> interpret_rules(const amr::Graph& g, const amr2sg::RuleConfig& cfg) {
  static const std::regex frame_re("-[0-9][0-9]$");
  auto concept_of = [&](const std::string& v) -> std::string {
    for (const auto& n : g.nodes()) {
      if (n.variable == v) return n.concept_label;
    }
    return {};
  };
  auto frame = [&](const std::string& v) {
    return std::regex_search(concept_of(v), frame_re);
  };
  auto modifier = [&](const std::string& v) {
    int incoming = 0;
    int attributive = 0;
    for (const auto& e : g.edges()) {
      if (!e.targets_variable() || e.target_variable() != v) continue;
      ++incoming;
      if (cfg.attribute_roles.count(e.role) && !frame(e.source)) ++attributive;
    }
    return incoming > 0 && incoming == attributive;
  };
  auto object = [&](const std::string& v) { return !frame(v) && !modifier(v); };
  auto norm = [](const std::string& s) { return normalize_oracle(s); };
  auto rank_of = [&](const std::string& role) -> int {
    for (std::size_t i = 0; i < cfg.core_roles.size(); ++i) {
      if (cfg.core_roles[i] == role) return static_cast<int>(i);
    }
    return -1;
  };

  std::vector<TupleKey> out;
  for (const auto& n : g.nodes()) {
    if (object(n.variable)) out.push_back({norm(n.concept_label)});
  }
  for (const auto& n : g.nodes()) {
    for (const auto& e : g.edges()) {
      if (e.source != n.variable || !object(n.variable) ||
          !cfg.attribute_roles.count(e.role)) {
        continue;
      }
      if (!e.targets_variable()) {
        std::string lit = std::get<amr::Constant>(e.target).text;
        if (lit.size() >= 2 && lit.front() == '"') lit = lit.substr(1, lit.size() - 2);
        out.push_back({norm(n.concept_label), norm(lit)});
      } else if (!frame(e.target_variable())) {
        out.push_back({norm(n.concept_label), norm(concept_of(e.target_variable()))});
      }
    }
  }
  for (const auto& n : g.nodes()) {
    if (!frame(n.variable)) continue;
    // (rank, edge index) for core children; edge index for locative ones
    std::vector<std::pair<int, std::size_t>> core;
    std::vector<std::size_t> loc;
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto& e = g.edges()[i];
      if (e.source != n.variable || !e.targets_variable() ||
          !object(e.target_variable())) {
        continue;
      }
      if (rank_of(e.role) >= 0) {
        core.emplace_back(rank_of(e.role), i);
      } else if (cfg.locative_roles.count(e.role)) {
        loc.push_back(i);
      }
    }
    if (core.empty()) continue;
    std::sort(core.begin(), core.end());
    const std::string lemma =
        std::regex_replace(n.concept_label, frame_re, "");
    const auto& subj_edge = g.edges()[core[0].second];
    const std::string subj = norm(concept_of(subj_edge.target_variable()));
    if (core.size() == 1 && loc.empty()) {
      out.push_back({subj, norm(lemma)});
      continue;
    }
    std::string pred = lemma;
    std::string obj;
    if (core.size() >= 2) {
      const auto& oe = g.edges()[core[1].second];
      obj = concept_of(oe.target_variable());
      if (oe.role == cfg.locative_fallback_role && core[0].first != 0) {
        pred += " " + cfg.locative_fallback_preposition;
      }
    } else {
      const auto& oe = g.edges()[loc[0]];
      obj = concept_of(oe.target_variable());
      pred += " " + cfg.locative_roles.at(oe.role);
    }
    out.push_back({subj, norm(pred), norm(obj)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sgram::testing
