#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "grammar.hpp"
#include "lexer.hpp"

namespace gwtest {

struct GrammarShape {
  int max_rules = 8;
  int max_depth = 3;  // group nesting
  int max_productions = 3;
  int max_terms = 3;
  std::vector<std::string> tokens{"A", "B"};
  std::vector<std::string> literals{"x", "y"};
};

/// Builds a well-formed grammar directly from structures (no parsing).
gw::Grammar random_grammar(std::mt19937_64& rng, const GrammarShape& shape = {});

/// One terminal of the generated alphabet.
struct Terminal {
  std::string name;
  bool literal;
};

std::vector<Terminal> alphabet(const GrammarShape& shape);

/// Every string over `alpha` of length 0..max_len.
std::vector<std::vector<Terminal>> all_strings(const std::vector<Terminal>& alpha, int max_len);

std::vector<gw::Token> to_tokens(const std::vector<Terminal>& s);

}  // namespace gwtest
