#pragma once

// Flattening of AMR graphs into token sequences for a seq2seq model.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgram/amr.hpp"

namespace sgram::linearize {

enum class Strategy { kDfs, kBfs, kInOrder };

std::string_view strategy_name(Strategy strategy);  // "dfs", "bfs", "inorder"
std::optional<Strategy> parse_strategy(std::string_view name);

struct Sequence {
  Strategy strategy;
  std::vector<std::string> tokens;
  std::string text;
};

// Canonical PENMAN text with the slash kept. Node tokens fuse "(var/concept"
// and absorb the close-parens that follow them.
Sequence linearize_dfs(const amr::Graph& graph);

// Level order over tree edges; every node gets its own "(var / concept)".
// Re-entrant targets print as "(var)" and are never expanded again.
Sequence linearize_bfs(const amr::Graph& graph);

// Left-root-right over the spanning tree. The first child is the left
// subtree; each remaining child follows the node, preceded by its role.
Sequence linearize_inorder(const amr::Graph& graph);

Sequence linearize(const amr::Graph& graph, Strategy strategy);

// Splits linearizer output into model tokens. Throws
// ErrorCode::kMalformedLinearization on unbalanced parentheses.
std::vector<std::string> tokenize(std::string_view text, Strategy strategy);

}  // namespace sgram::linearize
