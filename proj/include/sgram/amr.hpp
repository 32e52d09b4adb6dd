#pragma once

// AMR graphs and their PENMAN text form.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sgram::amr {

// Constant edge target: quoted string, number, "-" or another bare symbol
// that is not a variable. `text` keeps the literal exactly as written.
struct Constant {
  std::string text;

  // Literal with surrounding double quotes removed.
  std::string surface() const;

  friend bool operator==(const Constant&, const Constant&) = default;
};

struct VariableRef {
  std::string name;

  friend bool operator==(const VariableRef&, const VariableRef&) = default;
};

using EdgeTarget = std::variant<VariableRef, Constant>;

struct Node {
  std::string variable;
  std::string concept_label;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::string source;
  std::string role;
  EdgeTarget target;
  // First introduction of the target variable ("(var / concept)").
  // Always false for constants and re-entrant references.
  bool tree = false;

  bool targets_variable() const {
    return std::holds_alternative<VariableRef>(target);
  }
  const std::string& target_variable() const {
    return std::get<VariableRef>(target).name;
  }

  friend bool operator==(const Edge&, const Edge&) = default;
};

bool is_frame(std::string_view concept_label);

// "stand-01" -> "stand"; plain concepts are returned unchanged.
std::string frame_lemma(std::string_view concept_label);

bool is_variable_token(std::string_view token);

class Graph {
 public:
  Graph() = default;
  // No validation happens here; use validate() or parse_penman().
  Graph(std::string root, std::vector<Node> nodes, std::vector<Edge> edges);

  const std::string& root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const Node* find(std::string_view variable) const;
  const std::string& concept_of(std::string_view variable) const;
  bool empty() const { return nodes_.empty(); }

  std::vector<const Edge*> tree_edges() const;
  // Edges leaving `variable`, in stored order.
  std::vector<const Edge*> outgoing(std::string_view variable) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.root_ == b.root_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::string root_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Throws sgram::Error with a byte offset on malformed input.
Graph parse_penman(std::string_view text);

std::string serialize_penman(const Graph& graph);

enum class DiagnosticKind {
  kMissingRoot,
  kDuplicateVariable,
  kUndeclaredVariableReference,
  kUnreachableNode,
  kMultipleTreeEdges,
  kInvalidRole,
  kEmptyConcept,
  kInvalidVariable,
};

std::string_view diagnostic_kind_name(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string subject;  // offending variable or role

  std::string to_string() const;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::vector<Diagnostic> validate(const Graph& graph);

// One graph of a PENMAN file together with its "# ::key value" metadata.
struct PenmanBlock {
  std::map<std::string, std::string> metadata;
  std::string text;
  std::size_t line = 0;  // 1-based line of the block's first line

  std::optional<std::string> id() const;
};

std::vector<PenmanBlock> read_penman_blocks(std::istream& in);

}  // namespace sgram::amr
