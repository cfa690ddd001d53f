#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "earley.hpp"
#include "grammar.hpp"
#include "metadata.hpp"

namespace gw {

struct AstNode;

struct AstField {
  std::string role;
  bool list = false;
  std::vector<AstNode> values;  // exactly one when !list

  bool operator==(const AstField&) const = default;
};

struct AstNode {
  enum class Kind { Node, Token };

  Kind kind = Kind::Node;
  std::string label;            // Node
  std::vector<AstField> fields; // Node
  std::string terminal;         // Token
  bool literal = false;         // Token
  std::string text;             // Token
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const AstNode&) const = default;
};

/// Builds the AST for a parse tree produced over `g`. Expects the store to
/// pass check_integrity against `g`.
AstNode build_ast(const Grammar& g, const ParseNode& tree, const MetadataStore& store);

std::size_t node_count(const AstNode& ast);

std::string ast_to_json(const AstNode& ast, int indent = 2);
std::string ast_to_sexpr(const AstNode& ast);
std::string tree_to_json(const ParseNode& tree, int indent = 2);
std::string tree_to_sexpr(const ParseNode& tree);

}  // namespace gw
