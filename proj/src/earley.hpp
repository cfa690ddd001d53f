#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diagnostic.hpp"
#include "grammar.hpp"
#include "lexer.hpp"

namespace gw {

/// One repetition group passed through between a parent production and a
/// child: which group, and which iteration of it (0-based).
struct GroupStep {
  NodeId group;
  std::size_t iteration = 0;

  bool operator==(const GroupStep&) const = default;
};

struct ParseNode {
  enum class Kind { Rule, Leaf };

  Kind kind = Kind::Leaf;

  // Rule nodes.
  NodeId rule;
  NodeId production;
  std::string rule_name;
  std::size_t production_index = 0;
  std::vector<ParseNode> children;

  // Leaf nodes.
  Token token;

  // The grammar term of the parent production this node was matched by, and
  // the groups traversed to reach it. Unset for the root.
  NodeId term;
  std::vector<GroupStep> groups;

  std::size_t first_token = 0;  // [first_token, end_token)
  std::size_t end_token = 0;
  std::size_t begin = 0;  // byte range in the input
  std::size_t end = 0;
};

struct ParseOptions {
  bool strict_ambiguity = false;
};

struct ParseOutcome {
  ParseNode tree;
  Diagnostics diagnostics;  // warnings only (W_AMBIGUOUS)
};

/// Earley recognizer/parser over the desugared form of a grammar. Groups
/// are spliced back out of the produced trees. Immutable after
/// construction; safe to share between threads.
class EarleyParser {
 public:
  explicit EarleyParser(const Grammar& g);
  ~EarleyParser();
  EarleyParser(EarleyParser&&) noexcept;
  EarleyParser& operator=(EarleyParser&&) noexcept;

  bool recognize(std::string_view start, std::span<const Token> tokens) const;

  /// Throws E_NO_START, E_PARSE, or E_AMBIGUOUS under strict_ambiguity.
  ParseOutcome parse(std::string_view start, std::span<const Token> tokens,
                     const ParseOptions& opts = {}) const;

  struct Impl;  // opaque

 private:
  std::unique_ptr<Impl> impl_;
};

ParseOutcome parse_input(const Grammar& g, std::string_view start, std::span<const Token> tokens,
                         const ParseOptions& opts = {});

std::vector<Token> leaf_yield(const ParseNode& tree);
std::size_t node_count(const ParseNode& tree);

}  // namespace gw
