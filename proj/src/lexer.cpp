#include "lexer.hpp"

#include <algorithm>
#include <set>

namespace gw {

namespace {

void collect_literals(const std::vector<Term>& terms, std::set<std::string>& out) {
  for (const Term& t : terms) {
    if (const auto* lit = std::get_if<LiteralRef>(&t.kind)) out.insert(lit->text);
    if (const Group* grp = t.group()) collect_literals(grp->body, out);
  }
}

}  // namespace

Lexer::Lexer(const Grammar& g) {
  std::set<std::string> lits;
  for (const Rule& r : g.rules)
    for (const Production& p : r.productions) collect_literals(p.terms, lits);
  literals_.assign(lits.begin(), lits.end());
  for (const TokenDef& td : g.tokens) {
    try {
      named_.push_back(Named{td.name, TokenPattern::compile(td.pattern), td.skip});
    } catch (const PatternError& e) {
      throw DiagnosticError(make_error("E_BAD_REGEX", "token " + td.name + ": " + e.what(), td.span));
    }
  }
}

std::vector<Token> Lexer::lex_all(std::string_view input, const std::string& file) const {
  std::vector<Token> out;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;
  while (pos < input.size()) {
    std::size_t best_len = 0;
    const std::string* best_lit = nullptr;
    const Named* best_named = nullptr;
    for (const std::string& lit : literals_) {
      if (lit.size() > best_len && input.substr(pos, lit.size()) == lit) {
        best_len = lit.size();
        best_lit = &lit;
      }
    }
    for (const Named& n : named_) {
      auto len = n.pattern.longest_match(input, pos);
      // Strictly longer only: earlier declarations and literals win ties.
      if (len && *len > best_len) {
        best_len = *len;
        best_named = &n;
        best_lit = nullptr;
      }
    }
    if (best_len == 0) {
      SourceSpan sp{file, line, col, line, col};
      unsigned char c = static_cast<unsigned char>(input[pos]);
      std::string shown = c >= 0x20 && c < 0x7f ? std::string(1, static_cast<char>(c))
                                                : "\\x" + std::to_string(c);
      throw DiagnosticError(make_error("E_LEX",
                                       "no token matches at offset " + std::to_string(pos) +
                                           " ('" + shown + "')",
                                       sp));
    }
    Token t;
    t.literal = best_lit != nullptr;
    t.terminal = best_lit ? *best_lit : best_named->name;
    t.skipped = best_named && best_named->skip;
    t.lexeme = std::string(input.substr(pos, best_len));
    t.offset = pos;
    t.span.file = file;
    t.span.start_line = line;
    t.span.start_col = col;
    for (char c : t.lexeme) {
      t.span.end_line = line;
      t.span.end_col = col;
      if (c == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    pos += best_len;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Token> Lexer::tokenize(std::string_view input, const std::string& file) const {
  std::vector<Token> all = lex_all(input, file);
  std::erase_if(all, [](const Token& t) { return t.skipped; });
  return all;
}

std::vector<Token> tokenize(const Grammar& g, std::string_view input, const std::string& file) {
  return Lexer(g).tokenize(input, file);
}

}  // namespace gw
