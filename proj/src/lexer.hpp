#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "grammar.hpp"
#include "pattern.hpp"

namespace gw {

struct Token {
  std::string terminal;  // token name, or the literal text for literals
  bool literal = false;
  std::string lexeme;
  std::size_t offset = 0;  // byte offset into the input
  SourceSpan span;
  bool skipped = false;

  bool operator==(const Token& o) const {
    return terminal == o.terminal && literal == o.literal && lexeme == o.lexeme &&
           offset == o.offset && skipped == o.skipped;
  }
};

/// Longest-match lexer over a grammar's literals and token definitions.
/// Ties: literals beat named tokens, then declaration order.
class Lexer {
 public:
  explicit Lexer(const Grammar& g);

  /// Every consumed lexeme, skip tokens included. Throws E_LEX.
  std::vector<Token> lex_all(std::string_view input, const std::string& file = "<input>") const;

  /// Non-skipped tokens only.
  std::vector<Token> tokenize(std::string_view input, const std::string& file = "<input>") const;

 private:
  struct Named {
    std::string name;
    TokenPattern pattern;
    bool skip;
  };
  std::vector<std::string> literals_;
  std::vector<Named> named_;
};

std::vector<Token> tokenize(const Grammar& g, std::string_view input,
                            const std::string& file = "<input>");

}  // namespace gw
