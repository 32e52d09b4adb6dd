#include "sgram/linearize.hpp"

#include <cctype>
#include <deque>
#include <set>
#include <unordered_map>

#include "sgram/error.hpp"

namespace sgram::linearize {

namespace {

using amr::Edge;
using amr::Graph;

using Adjacency = std::unordered_map<std::string, std::vector<const Edge*>>;

Adjacency adjacency(const Graph& graph) {
  Adjacency out;
  for (const auto& e : graph.edges()) out[e.source].push_back(&e);
  return out;
}

std::string node_unit(const Graph& graph, const std::string& variable) {
  return "(" + variable + " / " + graph.concept_of(variable) + ")";
}

// Unit printed for an edge target that is not expanded in place.
std::string leaf_unit(const Edge& edge) {
  if (edge.targets_variable()) return "(" + edge.target_variable() + ")";
  return "(" + std::get<amr::Constant>(edge.target).text + ")";
}

bool expands(const Graph& graph, const Edge& edge,
             const std::set<std::string>& expanded) {
  return edge.tree && edge.targets_variable() &&
         graph.find(edge.target_variable()) != nullptr &&
         !expanded.contains(edge.target_variable());
}

std::string join(const std::vector<std::string>& pieces) {
  std::string out;
  for (const auto& p : pieces) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

Sequence finish(Strategy strategy, std::string text) {
  Sequence seq{strategy, tokenize(text, strategy), std::move(text)};
  return seq;
}

void inorder_visit(const Graph& graph, const Adjacency& adj,
                   const std::string& variable, std::set<std::string>& expanded,
                   std::vector<std::string>& pieces) {
  expanded.insert(variable);
  std::vector<const Edge*> children;
  if (auto it = adj.find(variable); it != adj.end()) children = it->second;

  auto emit_child = [&](const Edge& edge) {
    if (expands(graph, edge, expanded)) {
      inorder_visit(graph, adj, edge.target_variable(), expanded, pieces);
    } else {
      pieces.push_back(leaf_unit(edge));
    }
  };

  if (children.empty()) {
    pieces.push_back(node_unit(graph, variable));
    return;
  }
  emit_child(*children.front());
  pieces.push_back(children.front()->role);
  pieces.push_back(node_unit(graph, variable));
  for (std::size_t i = 1; i < children.size(); ++i) {
    pieces.push_back(children[i]->role);
    emit_child(*children[i]);
  }
}

enum class LexKind { kOpen, kClose, kSlash, kRole, kAtom };

struct Lexeme {
  LexKind kind;
  std::string_view text;
};

std::vector<Lexeme> lex(std::string_view text) {
  std::vector<Lexeme> out;
  std::size_t pos = 0;
  auto space = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  while (pos < text.size()) {
    const char c = text[pos];
    if (space(c)) {
      ++pos;
      continue;
    }
    if (c == '(' || c == ')' || c == '/') {
      out.push_back({c == '(' ? LexKind::kOpen
                     : c == ')' ? LexKind::kClose
                                : LexKind::kSlash,
                     text.substr(pos, 1)});
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    if (c == '"') {
      ++pos;
      while (pos < text.size() && text[pos] != '"') {
        pos += text[pos] == '\\' ? 2 : 1;
      }
      if (pos >= text.size()) {
        throw Error(ErrorCode::kMalformedLinearization,
                    "unterminated string literal", start);
      }
      ++pos;
    } else {
      while (pos < text.size() && !space(text[pos]) && text[pos] != '(' &&
             text[pos] != ')' && text[pos] != '/' && text[pos] != '"') {
        ++pos;
      }
    }
    const auto word = text.substr(start, pos - start);
    out.push_back({c == ':' ? LexKind::kRole : LexKind::kAtom, word});
  }
  return out;
}

}  // namespace

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kDfs: return "dfs";
    case Strategy::kBfs: return "bfs";
    case Strategy::kInOrder: return "inorder";
  }
  return "dfs";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "dfs" || name == "DFS") return Strategy::kDfs;
  if (name == "bfs" || name == "BFS") return Strategy::kBfs;
  if (name == "inorder" || name == "in-order" || name == "IN_ORDER") {
    return Strategy::kInOrder;
  }
  return std::nullopt;
}

Sequence linearize_dfs(const Graph& graph) {
  return finish(Strategy::kDfs, amr::serialize_penman(graph));
}

Sequence linearize_bfs(const Graph& graph) {
  if (graph.find(graph.root()) == nullptr) return {Strategy::kBfs, {}, {}};
  const Adjacency adj = adjacency(graph);
  std::vector<std::string> pieces{node_unit(graph, graph.root())};
  std::set<std::string> expanded{graph.root()};
  std::deque<std::string> queue{graph.root()};
  while (!queue.empty()) {
    const std::string current = std::move(queue.front());
    queue.pop_front();
    auto it = adj.find(current);
    if (it == adj.end()) continue;
    for (const Edge* edge : it->second) {
      pieces.push_back(edge->role);
      if (expands(graph, *edge, expanded)) {
        const auto& child = edge->target_variable();
        expanded.insert(child);
        pieces.push_back(node_unit(graph, child));
        queue.push_back(child);
      } else {
        pieces.push_back(leaf_unit(*edge));
      }
    }
  }
  return finish(Strategy::kBfs, join(pieces));
}

Sequence linearize_inorder(const Graph& graph) {
  if (graph.find(graph.root()) == nullptr) return {Strategy::kInOrder, {}, {}};
  const Adjacency adj = adjacency(graph);
  std::vector<std::string> pieces;
  std::set<std::string> expanded;
  inorder_visit(graph, adj, graph.root(), expanded, pieces);
  return finish(Strategy::kInOrder, join(pieces));
}

Sequence linearize(const Graph& graph, Strategy strategy) {
  switch (strategy) {
    case Strategy::kDfs: return linearize_dfs(graph);
    case Strategy::kBfs: return linearize_bfs(graph);
    case Strategy::kInOrder: return linearize_inorder(graph);
  }
  return linearize_dfs(graph);
}

std::vector<std::string> tokenize(std::string_view text, Strategy strategy) {
  // Head states inside "(var / concept": which piece is expected next.
  enum class Head { kNone, kVariable, kSlashOrEnd, kConcept, kDone };

  const bool flat = strategy != Strategy::kDfs;
  std::vector<std::string> tokens;
  Head head = Head::kNone;
  int depth = 0;
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::kMalformedLinearization, why);
  };

  for (const Lexeme& lx : lex(text)) {
    switch (lx.kind) {
      case LexKind::kOpen:
        if (head == Head::kVariable || head == Head::kConcept) {
          fail("'(' inside a node head");
        }
        if (flat && depth > 0) fail("nested node in a flat linearization");
        ++depth;
        tokens.emplace_back("(");
        head = Head::kVariable;
        break;
      case LexKind::kClose:
        if (depth == 0) fail("unbalanced ')'");
        if (head == Head::kVariable || head == Head::kConcept) {
          fail("incomplete node head");
        }
        --depth;
        tokens.back() += ')';
        head = Head::kNone;
        break;
      case LexKind::kSlash:
        if (head != Head::kSlashOrEnd) fail("unexpected '/'");
        tokens.back() += '/';
        head = Head::kConcept;
        break;
      case LexKind::kRole:
        if (head == Head::kVariable || head == Head::kConcept) {
          fail("incomplete node head");
        }
        if (flat && depth > 0) fail("role inside a flat node");
        tokens.emplace_back(lx.text);
        head = Head::kNone;
        break;
      case LexKind::kAtom:
        if (head == Head::kVariable) {
          tokens.back() += lx.text;
          head = Head::kSlashOrEnd;
        } else if (head == Head::kConcept) {
          tokens.back() += lx.text;
          head = Head::kDone;
        } else if (head == Head::kSlashOrEnd || head == Head::kDone) {
          fail("unexpected symbol after node head");
        } else {
          tokens.emplace_back(lx.text);
        }
        break;
    }
  }
  if (depth != 0) fail("unbalanced '('");
  return tokens;
}

}  // namespace sgram::linearize
