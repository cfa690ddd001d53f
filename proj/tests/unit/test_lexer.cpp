#include "doctest.h"
#include "aspect.hpp"
#include "lexer.hpp"
#include "test_util.hpp"
#include "weaver.hpp"

using namespace gw;

namespace {

Grammar dialect() {
  auto g = gwtest::base_grammar();
  return weave(g, {parse_syntactic_aspect(gwtest::data("intvars.gaspect"), "intvars")}).grammar;
}

std::vector<std::string> shape(const std::vector<Token>& ts) {
  std::vector<std::string> out;
  for (const Token& t : ts)
    out.push_back(t.literal ? "'" + t.terminal + "'" : t.terminal + " \"" + t.lexeme + "\"");
  return out;
}

}  // namespace

TEST_CASE("dialect tokens") {
  auto ts = tokenize(dialect(), "2*(3+4)");
  CHECK(shape(ts) == std::vector<std::string>{"INT \"2\"", "'*'", "'('", "INT \"3\"", "'+'",
                                               "INT \"4\"", "')'"});
  CHECK(ts[3].offset == 3);
  CHECK(ts[3].span.start_col == 4);
}

TEST_CASE("empty input") { CHECK(tokenize(dialect(), "").empty()); }

TEST_CASE("unused token definitions still lex") {
  CHECK(shape(tokenize(dialect(), "1.5")) == std::vector<std::string>{"REAL \"1.5\""});
}

TEST_CASE("skip tokens are consumed but omitted") {
  auto g = dialect();
  auto ts = tokenize(g, " x +\n 12 ");
  CHECK(shape(ts) == std::vector<std::string>{"ID \"x\"", "'+'", "INT \"12\""});
  CHECK(ts[2].span.start_line == 2);
  CHECK(ts[2].span.start_col == 2);
  auto all = Lexer(g).lex_all(" x +\n 12 ");
  CHECK(all.size() == 7);
  std::string joined;
  for (const Token& t : all) joined += t.lexeme;
  CHECK(joined == " x +\n 12 ");
}

TEST_CASE("tie breaking") {
  auto g = parse_grammar(
      "tokens { ID : /[a-z]+/ ; AB : /ab/ ; AB2 : /ab/ ; }\n"
      "r : 'if' : ID : AB : AB2 ;");
  CHECK(shape(tokenize(g, "if")) == std::vector<std::string>{"'if'"});
  CHECK(shape(tokenize(g, "iff")) == std::vector<std::string>{"ID \"iff\""});
  // ID is declared first and ties with AB
  CHECK(shape(tokenize(g, "ab")) == std::vector<std::string>{"ID \"ab\""});
  auto g2 = parse_grammar("tokens { AB : /ab/ ; AB2 : /ab/ ; ID : /[a-z]+/ ; }\nr : AB : AB2 : ID ;");
  CHECK(shape(tokenize(g2, "ab")) == std::vector<std::string>{"AB \"ab\""});
}

TEST_CASE("longest literal wins") {
  auto g = parse_grammar("r : '<' : '<=' : '<<=' ;");
  CHECK(shape(tokenize(g, "<<=<=<")) == std::vector<std::string>{"'<<='", "'<='", "'<'"});
}

TEST_CASE("lexing errors") {
  auto ds = gwtest::thrown([] { tokenize(dialect(), "1 + $", "in.txt"); });
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].code == "E_LEX");
  CHECK(ds[0].span.file == "in.txt");
  CHECK(ds[0].span.start_col == 5);
  CHECK(ds[0].message.find("offset 4") != std::string::npos);

  // a pattern matching only the empty string does not consume input
  auto g = parse_grammar("tokens { E : /a*/ ; }\nr : E ;");
  CHECK(gwtest::thrown_codes([&] { tokenize(g, "b"); }) == std::vector<std::string>{"E_LEX"});
}
