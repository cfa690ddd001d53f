#include "grammar_reader.hpp"

#include "pattern.hpp"
#include "scanner.hpp"

namespace gw {

std::string_view fragment_kind_name(FragmentKind k) {
  switch (k) {
    case FragmentKind::Terms: return "term sequence";
    case FragmentKind::Productions: return "production list";
    case FragmentKind::Rules: return "rule definitions";
  }
  return "term sequence";
}

namespace {

class GrammarParser {
 public:
  GrammarParser(Scanner& sc, std::uint64_t& next_id) : sc_(sc), next_id_(next_id) {}

  NodeId new_id() { return NodeId{next_id_++}; }

  void tokens_block(Grammar& g) {
    sc_.advance(6);  // "tokens"
    sc_.skip_trivia();
    expect('{', "'{' after 'tokens'");
    for (;;) {
      sc_.skip_trivia();
      if (sc_.at_end()) sc_.fail("unterminated tokens block, expected '}'");
      if (sc_.peek() == '}') {
        sc_.advance();
        return;
      }
      g.tokens.push_back(token_def());
    }
  }

  TokenDef token_def() {
    auto start = sc_.mark();
    TokenDef td;
    td.id = new_id();
    if (!sc_.at_ident_start()) sc_.fail("expected token name");
    auto name_mark = sc_.mark();
    td.name = sc_.read_ident();
    if (!is_token_name(td.name))
      sc_.fail("E_SYNTAX", "token names must match [A-Z][A-Z0-9_]*: '" + td.name + "'",
               sc_.span_from(name_mark));
    sc_.skip_trivia();
    expect(':', "':' after token name");
    sc_.skip_trivia();
    if (sc_.peek() != '/') sc_.fail("expected '/pattern/'");
    auto pat_mark = sc_.mark();
    sc_.advance();
    std::string pat;
    for (;;) {
      if (sc_.at_end() || sc_.peek() == '\n') {
        sc_.reset(pat_mark);
        sc_.fail("unterminated pattern");
      }
      char c = sc_.advance();
      if (c == '/') break;
      pat += c;
      if (c == '\\' && !sc_.at_end() && sc_.peek() != '\n') pat += sc_.advance();
    }
    try {
      TokenPattern::compile(pat);
    } catch (const PatternError& e) {
      sc_.fail("E_BAD_REGEX",
               "token " + td.name + ": " + e.what() + " at offset " + std::to_string(e.offset()),
               sc_.span_from(pat_mark));
    }
    td.pattern = std::move(pat);
    sc_.skip_trivia();
    if (sc_.looking_at("skip")) {
      auto m = sc_.mark();
      if (sc_.read_ident() == "skip") {
        td.skip = true;
      } else {
        sc_.reset(m);
      }
    }
    sc_.skip_trivia();
    expect(';', "';' after token definition");
    td.span = sc_.span_from(start);
    return td;
  }

  Rule rule() {
    auto start = sc_.mark();
    Rule r;
    r.id = new_id();
    if (!sc_.at_ident_start()) sc_.fail("expected rule name");
    auto name_mark = sc_.mark();
    r.name = sc_.read_ident();
    if (!is_rule_name(r.name))
      sc_.fail("E_SYNTAX", "rule names must match [a-z][a-zA-Z0-9_]*: '" + r.name + "'",
               sc_.span_from(name_mark));
    sc_.skip_trivia();
    if (sc_.peek() != ':') sc_.fail("expected ':' after rule name '" + r.name + "'");
    r.productions = productions(/*terminated=*/true);
    r.span = sc_.span_from(start);
    return r;
  }

  // Sequence of `: terms` alternatives. With `terminated`, a closing ';' is
  // required; otherwise the list runs to end of input.
  std::vector<Production> productions(bool terminated) {
    std::vector<Production> out;
    for (;;) {
      sc_.skip_trivia();
      if (sc_.peek() == ':') {
        auto start = sc_.mark();
        sc_.advance();
        Production p;
        p.id = new_id();
        p.terms = terms(false);
        p.span = sc_.span_from(start);
        out.push_back(std::move(p));
        continue;
      }
      if (terminated) {
        if (sc_.peek() == ';') {
          sc_.advance();
          return out;
        }
        if (sc_.at_end()) sc_.fail("expected ';' at end of input");
        sc_.fail("expected ':', ';' or a term");
      }
      if (sc_.at_end()) return out;
      sc_.fail("expected ':' or end of fragment");
    }
  }

  // Terms until a delimiter; `in_group` stops at ')'.
  std::vector<Term> terms(bool in_group) {
    std::vector<Term> out;
    for (;;) {
      sc_.skip_trivia();
      char c = sc_.peek();
      if (sc_.at_end() || c == ':' || c == ';' || (in_group && c == ')')) return out;
      out.push_back(term());
    }
  }

  Term term() {
    auto start = sc_.mark();
    Term t;
    char c = sc_.peek();
    if (c == '\'') {
      std::string text = sc_.read_quoted('\'');
      if (text.empty()) sc_.fail("E_SYNTAX", "empty literal", sc_.span_from(start));
      t.id = new_id();
      t.kind = LiteralRef{std::move(text)};
    } else if (c == '(') {
      sc_.advance();
      t.id = new_id();
      Group grp;
      grp.body = terms(true);
      if (sc_.peek() != ')') {
        if (sc_.at_end()) sc_.fail("unterminated group, expected ')'");
        sc_.fail("expected ')'");
      }
      if (grp.body.empty()) sc_.fail("E_SYNTAX", "empty group", sc_.span_from(start));
      sc_.advance();
      switch (sc_.peek()) {
        case '*': grp.rep = Repetition::Star; sc_.advance(); break;
        case '+': grp.rep = Repetition::Plus; sc_.advance(); break;
        case '?': grp.rep = Repetition::Opt; sc_.advance(); break;
        default: break;
      }
      t.kind = std::move(grp);
    } else if (sc_.at_ident_start()) {
      std::string name = sc_.read_ident();
      t.id = new_id();
      if (is_token_name(name)) {
        t.kind = TokenRef{std::move(name)};
      } else if (is_rule_name(name)) {
        t.kind = RuleRef{std::move(name)};
      } else {
        sc_.fail("E_SYNTAX",
                 "'" + name + "' is neither a TOKEN name (uppercase) nor a rule name (lowercase)",
                 sc_.span_from(start));
      }
    } else {
      sc_.fail(std::string("unexpected character '") + c + "'");
    }
    t.span = sc_.span_from(start);
    return t;
  }

  void expect(char c, const std::string& what) {
    if (sc_.peek() != c || sc_.at_end()) sc_.fail("expected " + what);
    sc_.advance();
  }

  // True when the cursor sits on the `tokens {` keyword.
  bool at_tokens_block() {
    if (!sc_.looking_at("tokens")) return false;
    auto m = sc_.mark();
    bool yes = sc_.read_ident() == "tokens";
    if (yes) {
      sc_.skip_trivia();
      yes = sc_.peek() == '{';
    }
    sc_.reset(m);
    return yes;
  }

 private:
  Scanner& sc_;
  std::uint64_t& next_id_;
};

}  // namespace

Grammar parse_grammar(std::string_view text, const std::string& file) {
  Grammar g;
  Scanner sc(text, file);
  GrammarParser p(sc, g.next_node_id);
  g.root_id = g.new_id();
  sc.skip_trivia();
  if (p.at_tokens_block()) p.tokens_block(g);
  for (;;) {
    sc.skip_trivia();
    if (sc.at_end()) break;
    g.rules.push_back(p.rule());
  }
  return g;
}

FragmentKind classify_fragment(std::string_view text) {
  Scanner sc(text, "");
  sc.skip_trivia();
  if (sc.peek() == ':') return FragmentKind::Productions;
  if (sc.at_ident_start()) {
    std::string name = sc.read_ident();
    sc.skip_trivia();
    if (sc.peek() == ':' && is_rule_name(name)) return FragmentKind::Rules;
  }
  return FragmentKind::Terms;
}

std::vector<Term> parse_term_fragment(std::string_view text, const FragmentOrigin& origin,
                                      std::uint64_t& next_id) {
  Scanner sc(text, origin.file, origin.line, origin.col);
  GrammarParser p(sc, next_id);
  std::vector<Term> out = p.terms(false);
  sc.skip_trivia();
  if (!sc.at_end()) sc.fail(std::string("unexpected '") + sc.peek() + "' in term fragment");
  if (out.empty()) sc.fail("E_FRAGMENT_EMPTY", "term fragment is empty", sc.point());
  return out;
}

std::vector<Production> parse_production_fragment(std::string_view text,
                                                  const FragmentOrigin& origin,
                                                  std::uint64_t& next_id) {
  Scanner sc(text, origin.file, origin.line, origin.col);
  GrammarParser p(sc, next_id);
  sc.skip_trivia();
  if (sc.peek() != ':') sc.fail("production fragment must start with ':'");
  std::vector<Production> out = p.productions(false);
  return out;
}

std::vector<Rule> parse_rule_fragment(std::string_view text, const FragmentOrigin& origin,
                                      std::uint64_t& next_id) {
  Scanner sc(text, origin.file, origin.line, origin.col);
  GrammarParser p(sc, next_id);
  std::vector<Rule> out;
  for (;;) {
    sc.skip_trivia();
    if (sc.at_end()) break;
    out.push_back(p.rule());
  }
  if (out.empty()) sc.fail("E_FRAGMENT_EMPTY", "rule fragment is empty", sc.point());
  return out;
}

}  // namespace gw
