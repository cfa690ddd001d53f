#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "grammar.hpp"

namespace gw {

/// Parses a .gram source. Throws DiagnosticError (E_SYNTAX, E_BAD_REGEX).
/// Well-formedness (dangling references, duplicates) is not checked here.
Grammar parse_grammar(std::string_view text, const std::string& file = "<input>");

/// Where an embedded fragment starts inside its enclosing file.
struct FragmentOrigin {
  std::string file;
  int line = 1;
  int col = 1;
};

enum class FragmentKind { Terms, Productions, Rules };

std::string_view fragment_kind_name(FragmentKind k);

/// Shape guess from the first tokens: `:` starts productions, `name :`
/// starts rules, anything else is a term sequence.
FragmentKind classify_fragment(std::string_view text);

// Fragment readers allocate NodeIds from `next_id` (a grammar's counter).
std::vector<Term> parse_term_fragment(std::string_view text, const FragmentOrigin& origin,
                                      std::uint64_t& next_id);
std::vector<Production> parse_production_fragment(std::string_view text,
                                                  const FragmentOrigin& origin,
                                                  std::uint64_t& next_id);
std::vector<Rule> parse_rule_fragment(std::string_view text, const FragmentOrigin& origin,
                                      std::uint64_t& next_id);

}  // namespace gw
