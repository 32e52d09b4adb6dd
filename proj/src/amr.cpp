#include "sgram/amr.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <unordered_map>

#include "sgram/error.hpp"

namespace sgram {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnbalancedParentheses: return "UnbalancedParentheses";
    case ErrorCode::kDuplicateVariableDeclaration:
      return "DuplicateVariableDeclaration";
    case ErrorCode::kUndeclaredVariableReference:
      return "UndeclaredVariableReference";
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kMalformedLinearization: return "MalformedLinearization";
    case ErrorCode::kEmptyAfterNormalization: return "EmptyAfterNormalization";
    case ErrorCode::kBadArity: return "BadArity";
    case ErrorCode::kReservedCharacter: return "ReservedCharacter";
    case ErrorCode::kAdapterTimeout: return "AdapterTimeout";
    case ErrorCode::kAdapterCrashed: return "AdapterCrashed";
    case ErrorCode::kMalformedModelOutput: return "MalformedModelOutput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kUnknownGoldImage: return "UnknownGoldImage";
    case ErrorCode::kEmptyResults: return "EmptyResults";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

namespace amr {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}
bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Bare symbols of this shape are taken to be variable references, so an
// unknown one is an error rather than a silently accepted constant.
bool looks_like_reference(std::string_view token) {
  if (token.empty() || !is_lower(token[0])) return false;
  return std::all_of(token.begin() + 1, token.end(), is_digit);
}

enum class TokenKind { kOpen, kClose, kSlash, kRole, kString, kSymbol, kEnd };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t offset;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) return {TokenKind::kEnd, {}, start};
    const char c = text_[pos_];
    switch (c) {
      case '(': ++pos_; return {TokenKind::kOpen, text_.substr(start, 1), start};
      case ')': ++pos_; return {TokenKind::kClose, text_.substr(start, 1), start};
      case '/': ++pos_; return {TokenKind::kSlash, text_.substr(start, 1), start};
      case '"': return lex_string();
      default: break;
    }
    while (pos_ < text_.size() && !is_space(text_[pos_]) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != '/' &&
           text_[pos_] != '"') {
      ++pos_;
    }
    const auto word = text_.substr(start, pos_ - start);
    if (c == ':') {
      if (word.size() < 2) {
        throw Error(ErrorCode::kSyntax, "role label without a name", start);
      }
      return {TokenKind::kRole, word, start};
    }
    return {TokenKind::kSymbol, word, start};
  }

  Token peek() {
    const std::size_t saved = pos_;
    Token t = next();
    pos_ = saved;
    return t;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  Token lex_string() {
    const std::size_t start = pos_++;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '\\') {
        pos_ += 2;
        continue;
      }
      if (text_[pos_] == '"') {
        ++pos_;
        return {TokenKind::kString, text_.substr(start, pos_ - start), start};
      }
      ++pos_;
    }
    throw Error(ErrorCode::kSyntax, "unterminated string literal", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct PendingReference {
  std::size_t edge_index;
  std::size_t offset;
};

class PenmanParser {
 public:
  explicit PenmanParser(std::string_view text) : lexer_(text) {}

  Graph parse() {
    Token first = lexer_.peek();
    if (first.kind == TokenKind::kEnd) {
      throw Error(ErrorCode::kEmptyInput, "no graph in input", first.offset);
    }
    if (first.kind == TokenKind::kClose) {
      throw Error(ErrorCode::kUnbalancedParentheses, "unexpected ')'",
                  first.offset);
    }
    if (first.kind != TokenKind::kOpen) {
      throw Error(ErrorCode::kSyntax, "graph must start with '('",
                  first.offset);
    }
    const std::string root = parse_node();
    Token rest = lexer_.next();
    if (rest.kind == TokenKind::kClose) {
      throw Error(ErrorCode::kUnbalancedParentheses, "unexpected ')'",
                  rest.offset);
    }
    if (rest.kind != TokenKind::kEnd) {
      throw Error(ErrorCode::kSyntax, "trailing content after graph",
                  rest.offset);
    }
    resolve_references();
    return Graph(root, std::move(nodes_), std::move(edges_));
  }

 private:
  Token expect_inside(TokenKind kind, const char* what) {
    Token t = lexer_.next();
    if (t.kind == TokenKind::kEnd) {
      throw Error(ErrorCode::kUnbalancedParentheses,
                  "input ended inside an unclosed '('", t.offset);
    }
    if (t.kind != kind) {
      throw Error(ErrorCode::kSyntax,
                  std::string("expected ") + what + ", found '" +
                      std::string(t.text) + "'",
                  t.offset);
    }
    return t;
  }

  std::string parse_node() {
    expect_inside(TokenKind::kOpen, "'('");
    Token var = expect_inside(TokenKind::kSymbol, "variable");
    if (!is_variable_token(var.text)) {
      throw Error(ErrorCode::kSyntax,
                  "invalid variable name '" + std::string(var.text) + "'",
                  var.offset);
    }
    std::string variable(var.text);
    if (!declared_.insert(variable).second) {
      throw Error(ErrorCode::kDuplicateVariableDeclaration,
                  "variable '" + variable + "' declared twice", var.offset);
    }
    expect_inside(TokenKind::kSlash, "'/'");
    Token concept_token = expect_inside(TokenKind::kSymbol, "concept");
    nodes_.push_back({variable, std::string(concept_token.text)});

    for (;;) {
      Token t = lexer_.next();
      if (t.kind == TokenKind::kClose) return variable;
      if (t.kind == TokenKind::kEnd) {
        throw Error(ErrorCode::kUnbalancedParentheses,
                    "input ended inside an unclosed '('", t.offset);
      }
      if (t.kind != TokenKind::kRole) {
        throw Error(ErrorCode::kSyntax,
                    "expected role or ')', found '" + std::string(t.text) +
                        "'",
                    t.offset);
      }
      const std::size_t edge_index = edges_.size();
      edges_.push_back({variable, std::string(t.text), Constant{}, false});
      Token target = lexer_.peek();
      switch (target.kind) {
        case TokenKind::kOpen: {
          std::string child = parse_node();
          edges_[edge_index].target = VariableRef{std::move(child)};
          edges_[edge_index].tree = true;
          break;
        }
        case TokenKind::kString:
          lexer_.next();
          edges_[edge_index].target = Constant{std::string(target.text)};
          break;
        case TokenKind::kSymbol:
          lexer_.next();
          edges_[edge_index].target = Constant{std::string(target.text)};
          pending_.push_back({edge_index, target.offset});
          break;
        case TokenKind::kEnd:
          throw Error(ErrorCode::kUnbalancedParentheses,
                      "input ended inside an unclosed '('", target.offset);
        default:
          throw Error(ErrorCode::kSyntax,
                      "role '" + std::string(t.text) + "' has no target",
                      target.offset);
      }
    }
  }

  // Bare symbols may refer to variables declared later in the text.
  void resolve_references() {
    for (const auto& ref : pending_) {
      Edge& edge = edges_[ref.edge_index];
      std::string symbol = std::get<Constant>(edge.target).text;
      if (declared_.contains(symbol)) {
        edge.target = VariableRef{std::move(symbol)};
      } else if (looks_like_reference(symbol)) {
        throw Error(ErrorCode::kUndeclaredVariableReference,
                    "reference to undeclared variable '" + symbol + "'",
                    ref.offset);
      }
    }
  }

  Lexer lexer_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::set<std::string, std::less<>> declared_;
  std::vector<PendingReference> pending_;
};

void serialize_node(const Graph& graph, const std::string& variable,
                    const std::unordered_map<std::string,
                                             std::vector<const Edge*>>& out,
                    std::set<std::string>& emitted, std::string& text) {
  emitted.insert(variable);
  text += '(';
  text += variable;
  text += " / ";
  text += graph.concept_of(variable);
  if (auto it = out.find(variable); it != out.end()) {
    for (const Edge* edge : it->second) {
      text += ' ';
      text += edge->role;
      text += ' ';
      if (!edge->targets_variable()) {
        text += std::get<Constant>(edge->target).text;
      } else if (edge->tree && !emitted.contains(edge->target_variable()) &&
                 graph.find(edge->target_variable()) != nullptr) {
        serialize_node(graph, edge->target_variable(), out, emitted, text);
      } else {
        text += edge->target_variable();
      }
    }
  }
  text += ')';
}

}  // namespace

std::string Constant::surface() const {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    return text.substr(1, text.size() - 2);
  }
  return text;
}

bool is_frame(std::string_view concept_label) {
  const auto n = concept_label.size();
  return n >= 4 && concept_label[n - 3] == '-' &&
         is_digit(concept_label[n - 2]) && is_digit(concept_label[n - 1]);
}

std::string frame_lemma(std::string_view concept_label) {
  if (!is_frame(concept_label)) return std::string(concept_label);
  return std::string(concept_label.substr(0, concept_label.size() - 3));
}

bool is_variable_token(std::string_view token) {
  if (token.empty() || !is_lower(token[0])) return false;
  return std::all_of(token.begin() + 1, token.end(), is_alnum);
}

Graph::Graph(std::string root, std::vector<Node> nodes, std::vector<Edge> edges)
    : root_(std::move(root)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    index_.emplace(nodes_[i].variable, i);
  }
}

const Node* Graph::find(std::string_view variable) const {
  auto it = index_.find(variable);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const std::string& Graph::concept_of(std::string_view variable) const {
  const Node* node = find(variable);
  if (node == nullptr) {
    throw Error(ErrorCode::kUndeclaredVariableReference,
                "unknown variable '" + std::string(variable) + "'");
  }
  return node->concept_label;
}

std::vector<const Edge*> Graph::tree_edges() const {
  std::vector<const Edge*> out;
  for (const auto& e : edges_) {
    if (e.tree) out.push_back(&e);
  }
  return out;
}

std::vector<const Edge*> Graph::outgoing(std::string_view variable) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges_) {
    if (e.source == variable) out.push_back(&e);
  }
  return out;
}

Graph parse_penman(std::string_view text) { return PenmanParser(text).parse(); }

std::string serialize_penman(const Graph& graph) {
  if (graph.find(graph.root()) == nullptr) return {};
  std::unordered_map<std::string, std::vector<const Edge*>> out;
  for (const auto& e : graph.edges()) out[e.source].push_back(&e);
  std::set<std::string> emitted;
  std::string text;
  serialize_node(graph, graph.root(), out, emitted, text);
  return text;
}

std::string_view diagnostic_kind_name(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kMissingRoot: return "MissingRoot";
    case DiagnosticKind::kDuplicateVariable: return "DuplicateVariable";
    case DiagnosticKind::kUndeclaredVariableReference:
      return "UndeclaredVariableReference";
    case DiagnosticKind::kUnreachableNode: return "UnreachableNode";
    case DiagnosticKind::kMultipleTreeEdges: return "MultipleTreeEdges";
    case DiagnosticKind::kInvalidRole: return "InvalidRole";
    case DiagnosticKind::kEmptyConcept: return "EmptyConcept";
    case DiagnosticKind::kInvalidVariable: return "InvalidVariable";
  }
  return "Unknown";
}

std::string Diagnostic::to_string() const {
  return std::string(diagnostic_kind_name(kind)) + "(" + subject + ")";
}

std::vector<Diagnostic> validate(const Graph& graph) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (const auto& node : graph.nodes()) {
    if (!seen.insert(node.variable).second) {
      out.push_back({DiagnosticKind::kDuplicateVariable, node.variable});
    }
    if (!is_variable_token(node.variable)) {
      out.push_back({DiagnosticKind::kInvalidVariable, node.variable});
    }
    if (node.concept_label.empty()) {
      out.push_back({DiagnosticKind::kEmptyConcept, node.variable});
    }
  }
  const bool has_root = graph.find(graph.root()) != nullptr;
  if (!has_root) out.push_back({DiagnosticKind::kMissingRoot, graph.root()});

  std::unordered_map<std::string, std::vector<std::string>> children;
  std::map<std::string, int> tree_in;
  for (const auto& edge : graph.edges()) {
    if (edge.role.size() < 2 || edge.role[0] != ':') {
      out.push_back({DiagnosticKind::kInvalidRole, edge.role});
    }
    if (graph.find(edge.source) == nullptr) {
      out.push_back({DiagnosticKind::kUndeclaredVariableReference, edge.source});
    }
    if (!edge.targets_variable()) continue;
    const auto& target = edge.target_variable();
    if (graph.find(target) == nullptr) {
      out.push_back({DiagnosticKind::kUndeclaredVariableReference, target});
      continue;
    }
    if (edge.tree) {
      if (++tree_in[target] == 2 || target == graph.root()) {
        out.push_back({DiagnosticKind::kMultipleTreeEdges, target});
      }
      children[edge.source].push_back(target);
    }
  }

  // Reachability from the root over tree edges only.
  std::set<std::string> reached;
  if (has_root) {
    std::deque<std::string> queue{graph.root()};
    reached.insert(graph.root());
    while (!queue.empty()) {
      auto current = std::move(queue.front());
      queue.pop_front();
      for (const auto& child : children[current]) {
        if (reached.insert(child).second) queue.push_back(child);
      }
    }
  }
  std::set<std::string> reported;
  for (const auto& node : graph.nodes()) {
    if (!reached.contains(node.variable) &&
        reported.insert(node.variable).second && has_root) {
      out.push_back({DiagnosticKind::kUnreachableNode, node.variable});
    }
  }
  return out;
}

}  // namespace amr
}  // namespace sgram
