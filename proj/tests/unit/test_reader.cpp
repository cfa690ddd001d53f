#include <cstring>

#include "doctest.h"
#include "grammar.hpp"
#include "grammar_reader.hpp"
#include "test_util.hpp"

using namespace gw;
using gwtest::thrown;
using gwtest::thrown_codes;

TEST_CASE("base grammar listing parses") {
  auto g = gwtest::base_grammar();
  REQUIRE(g.rules.size() == 3);
  CHECK(g.rules[0].name == "sum");
  CHECK(g.rules[1].name == "mult");
  CHECK(g.rules[2].name == "factor");
  CHECK(g.rules[2].productions.size() == 2);
  REQUIRE(g.tokens.size() == 4);
  CHECK(g.tokens[3].name == "WS");
  CHECK(g.tokens[3].skip);
  const Group* grp = g.rules[0].productions[0].terms[1].group();
  REQUIRE(grp);
  CHECK(grp->rep == Repetition::Star);
  CHECK(grp->body.size() == 2);
}

TEST_CASE("minimal grammar") {
  auto g = parse_grammar("tokens { ID : /[a-z]+/ ; }\na : ID ;");
  REQUIRE(g.rules.size() == 1);
  REQUIRE(g.rules[0].productions.size() == 1);
  REQUIRE(g.rules[0].productions[0].terms.size() == 1);
  CHECK(g.rules[0].productions[0].terms[0].is_token());
}

TEST_CASE("spans are recorded") {
  auto g = parse_grammar("a : 'x'\n  b ;\nb : ;", "f.gram");
  const Term& b = g.rules[0].productions[0].terms[1];
  CHECK(b.span.file == "f.gram");
  CHECK(b.span.start_line == 2);
  CHECK(b.span.start_col == 3);
  CHECK(g.rules[1].span.start_line == 3);
}

TEST_CASE("missing semicolon is a syntax error at end of input") {
  auto ds = thrown([] { parse_grammar("a : ID"); });
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].code == "E_SYNTAX");
  CHECK(ds[0].span.start_line == 1);
  CHECK(ds[0].span.start_col == 6);
}

TEST_CASE("syntax errors") {
  const char* bad[] = {
      "a ID ;",             // missing colon
      "A : ID ;",           // rule names are lowercase
      "a : ( ;",            // unbalanced group
      "a : 'x ;",           // unterminated literal
      "a : ) ;",            // stray paren
      "tokens { a : /x/ ; }",  // token names are uppercase
      "tokens { A : x ; }",    // pattern needs slashes
      "tokens { A : /x/ }",    // missing semicolon
      "tokens { A : /x/ ; ",   // unterminated block
      "a : ID ; ;",
      "a : #",
  };
  for (const char* src : bad) {
    CAPTURE(src);
    CHECK(thrown_codes([&] { parse_grammar(src); }) == std::vector<std::string>{"E_SYNTAX"});
  }
}

TEST_CASE("bad token pattern") {
  CHECK(thrown_codes([] { parse_grammar("tokens { A : /a{2}/ ; }\na : A ;"); }) ==
        std::vector<std::string>{"E_BAD_REGEX"});
  CHECK(thrown_codes([] { parse_grammar("tokens { A : /(a/ ; }\na : A ;"); }) ==
        std::vector<std::string>{"E_BAD_REGEX"});
}

TEST_CASE("escaped slash in token pattern") {
  auto g = parse_grammar("tokens { DIV : /\\/|\\// ; }\na : DIV ;");
  CHECK(g.tokens[0].pattern == "\\/|\\/");
}

TEST_CASE("empty literal and empty group are rejected by the reader") {
  auto lit = thrown([] { parse_grammar("a : '' ;"); });
  REQUIRE(lit.size() == 1);
  CHECK(lit[0].code == "E_SYNTAX");
  CHECK(lit[0].message.find("empty literal") != std::string::npos);
  auto grp = thrown([] { parse_grammar("a : ()* ;"); });
  REQUIRE(grp.size() == 1);
  CHECK(grp[0].message.find("empty group") != std::string::npos);
}

TEST_CASE("well-formedness flags empty literals and groups built in memory") {
  auto g = parse_grammar("a : 'x' ('y') ;");
  std::get<LiteralRef>(g.rules[0].productions[0].terms[0].kind).text.clear();
  g.rules[0].productions[0].terms[1].group()->body.clear();
  CHECK(gwtest::codes(check_well_formed(g)) == std::vector<std::string>{"E_EMPTY_LITERAL", "E_EMPTY_GROUP"});
}

TEST_CASE("comments and whitespace are ignored") {
  auto a = parse_grammar("// header\na // name\n : 'x' // term\n ; // end\n");
  auto b = parse_grammar("a : 'x' ;");
  CHECK(structurally_equal(a, b));
}

TEST_CASE("diagnostic spans stay inside the input") {
  const char* bad[] = {"a : ID", "a", "a :", "\n\n   a : (", "tokens {", "a : 'x' 'y"};
  for (const char* src : bad) {
    CAPTURE(src);
    auto ds = thrown([&] { parse_grammar(src); });
    REQUIRE_FALSE(ds.empty());
    int lines = 1 + static_cast<int>(std::count(src, src + std::strlen(src), '\n'));
    CHECK(ds[0].span.start_line >= 1);
    CHECK(ds[0].span.start_line <= lines);
  }
}

TEST_CASE("fragment classification and parsing") {
  CHECK(classify_fragment(" INT ") == FragmentKind::Terms);
  CHECK(classify_fragment(": ID") == FragmentKind::Productions);
  CHECK(classify_fragment("x : 'a' ; y : ;") == FragmentKind::Rules);
  CHECK(classify_fragment("x y") == FragmentKind::Terms);

  std::uint64_t next = 100;
  auto terms = parse_term_fragment("INT ('+' INT)*", {"a.gaspect", 3, 10}, next);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].id.value == 100);
  CHECK(terms[0].span.start_line == 3);
  CHECK(terms[0].span.start_col == 10);
  CHECK(next == 104);

  auto prods = parse_production_fragment(": ID : 'x' b :", {}, next);
  CHECK(prods.size() == 3);
  CHECK(prods[2].terms.empty());

  auto rules = parse_rule_fragment("x : 'a' ;\ny\n : 'b'\n : ;", {}, next);
  REQUIRE(rules.size() == 2);
  CHECK(rules[1].productions.size() == 2);

  CHECK(thrown_codes([&] { parse_term_fragment(": ID", {}, next); }) == std::vector<std::string>{"E_SYNTAX"});
}
