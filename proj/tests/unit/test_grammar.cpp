#include "doctest.h"
#include "grammar.hpp"
#include "grammar_reader.hpp"
#include "test_util.hpp"

using namespace gw;
using gwtest::codes;

TEST_CASE("base grammar is well formed") {
  auto g = gwtest::base_grammar();
  CHECK(check_well_formed(g).empty());
  CHECK(g.rules.size() == 3);
  CHECK(g.find_rule("factor")->productions.size() == 2);
}

TEST_CASE("undefined rule reference") {
  auto g = parse_grammar("a : b ;");
  auto ds = check_well_formed(g);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].code == "E_UNDEF_RULE");
  CHECK(ds[0].path == "a.p0.t0");
  CHECK(ds[0].severity == Severity::Error);
}

TEST_CASE("duplicate rule names") {
  auto g = parse_grammar("tokens { X : /x/ ; }\nsum : X ;\nsum : X X ;");
  CHECK(codes(check_well_formed(g)) == std::vector<std::string>{"E_DUP_RULE"});
}

TEST_CASE("other well-formedness findings") {
  auto g = parse_grammar("tokens { X : /x/ ; X : /y/ ; }\na : Y ;");
  auto cs = codes(check_well_formed(g));
  CHECK(std::count(cs.begin(), cs.end(), "E_DUP_TOKEN") == 1);
  CHECK(std::count(cs.begin(), cs.end(), "E_UNDEF_TOKEN") == 1);

  Grammar empty_rule = parse_grammar("a : ;");
  empty_rule.rules[0].productions.clear();
  CHECK(codes(check_well_formed(empty_rule)) == std::vector<std::string>{"E_EMPTY_RULE"});

  Grammar bad_name = parse_grammar("a : ;");
  bad_name.rules[0].name = "Abc";
  CHECK(codes(check_well_formed(bad_name)) == std::vector<std::string>{"E_BAD_NAME"});
}

TEST_CASE("pretty print of the base grammar") {
  auto g = gwtest::base_grammar();
  std::string text = pretty_print(g);
  CHECK(text.find("sum : mult ('+' mult)* ;\n") != std::string::npos);
  CHECK(text.find("factor\n    : REAL\n    : '(' sum ')'\n    ;\n") != std::string::npos);
  CHECK(text.rfind("tokens {\n    REAL : /[0-9]+\\.[0-9]+/ ;\n", 0) == 0);
  CHECK(text.find("    WS : /[ \\t\\r\\n]+/ skip ;\n}\n\nsum") != std::string::npos);
  CHECK(pretty_print(g) == text);
}

TEST_CASE("pretty print of a minimal grammar") {
  CHECK(pretty_print(parse_grammar("a : ID ;")) == "a : ID ;\n");
  CHECK(pretty_print(parse_grammar("a\n:\n: 'x'\n;")) == "a\n    :\n    : 'x'\n    ;\n");
  CHECK(pretty_print(parse_grammar("a : ;")) == "a : ;\n");
  CHECK(pretty_print(parse_grammar("a : 'it\\'s' '\\\\' ;")) == "a : 'it\\'s' '\\\\' ;\n");
  CHECK(pretty_print(parse_grammar("a : (b (c)+)? ;")) == "a : (b (c)+)? ;\n");
}

TEST_CASE("resolve_path on the base grammar") {
  auto g = gwtest::base_grammar();
  NodeRef real = resolve_path(g, "factor.p0.t0");
  REQUIRE(real.kind == NodeKind::Term);
  CHECK(real.term->is_token());
  CHECK(real.term->symbol() == "REAL");

  NodeRef plus = resolve_path(g, "sum.p0.t1.t0");
  REQUIRE(plus.kind == NodeKind::Term);
  CHECK(plus.term->is_literal());
  CHECK(plus.term->symbol() == "+");

  CHECK(resolve_path(g, "factor").kind == NodeKind::Rule);
  CHECK(resolve_path(g, "factor.p1").kind == NodeKind::Production);
  CHECK(resolve_path(g, "$grammar").kind == NodeKind::Grammar);
  CHECK(resolve_path(g, "$grammar").id(g) == g.root_id);

  for (const char* bad : {"factor.p9", "nosuch", "factor.p0.t3", "factor.p0.t0.t0", "factor.", "factor.q1",
                          "factor.p", "factor.p01x", "", "sum.t0"}) {
    CAPTURE(bad);
    CHECK(gwtest::thrown_codes([&] { resolve_path(g, bad); }) == std::vector<std::string>{"E_BAD_PATH"});
  }
}

TEST_CASE("path_of and locate round trip on every node") {
  auto g = gwtest::base_grammar();
  std::size_t visited = 0;
  for_each_node(g, [&](const NodeLocation& loc, NodeId id) {
    ++visited;
    auto path = path_of(g, id);
    REQUIRE(path.has_value());
    CHECK(*path == format_path(g, loc));
    CHECK(resolve_path(g, *path).id(g) == id);
    CHECK(locate(g, id) == loc);
  });
  // 3 rules, 4 productions, 12 terms
  CHECK(visited == 19);
  CHECK(path_of(g, g.root_id) == std::optional<std::string>("$grammar"));
  CHECK_FALSE(path_of(g, NodeId{9999}).has_value());
}

TEST_CASE("node ids are unique") {
  auto g = gwtest::base_grammar();
  std::vector<NodeId> ids{g.root_id};
  for (const auto& t : g.tokens) ids.push_back(t.id);
  for_each_node(g, [&](const NodeLocation&, NodeId id) { ids.push_back(id); });
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("desugar the sum rule") {
  auto g = parse_grammar("sum : mult ('+' mult)* ;\nmult : 'm' ;");
  auto d = desugar_groups(g);
  REQUIRE(d.rules.size() == 3);
  CHECK(d.rules[0].name == "sum");
  CHECK(d.rules[1].name == "sum%g0");
  CHECK(d.rules[2].name == "mult");
  CHECK(print_terms(d.rules[0].productions[0].terms) == "mult sum%g0");
  REQUIRE(d.rules[1].productions.size() == 2);
  CHECK(d.rules[1].productions[0].terms.empty());
  CHECK(print_terms(d.rules[1].productions[1].terms) == "sum%g0 '+' mult");
  CHECK(d.rules[1].synthetic());
  CHECK(d.rules[1].synthetic_from == g.rules[0].productions[0].terms[1].id);
  CHECK(d.rules[1].synthetic_rep == Repetition::Star);
  CHECK(check_well_formed(d).empty());
}

TEST_CASE("desugar rewrites for plus, optional and plain groups") {
  auto g = parse_grammar("a : ('x')+ ('y')? ('z' ('w')*) ;");
  auto d = desugar_groups(g);
  REQUIRE(d.rules.size() == 5);
  CHECK(print_terms(d.rules[0].productions[0].terms) == "a%g0 a%g1 a%g2");
  // plus: body | self body
  CHECK(print_terms(d.rules[1].productions[0].terms) == "'x'");
  CHECK(print_terms(d.rules[1].productions[1].terms) == "a%g0 'x'");
  // optional: epsilon | body
  CHECK(d.rules[2].productions[0].terms.empty());
  CHECK(print_terms(d.rules[2].productions[1].terms) == "'y'");
  // plain group, outer before inner
  CHECK(d.rules[3].name == "a%g2");
  CHECK(print_terms(d.rules[3].productions[0].terms) == "'z' a%g3");
  CHECK(d.rules[4].name == "a%g3");
  CHECK(check_well_formed(d).empty());

  // clones get fresh ids but remember their source
  const Term& clone = d.rules[1].productions[1].terms[1];
  const Term& first = d.rules[1].productions[0].terms[0];
  CHECK(clone.id != first.id);
  CHECK(clone.source_id() == first.source_id());
}

TEST_CASE("desugar is the identity on group-free grammars") {
  auto g = parse_grammar("tokens { A : /a/ ; }\na : A b ;\nb : 'x' : ;");
  auto d = desugar_groups(g);
  CHECK(structurally_equal(g, d));
}

TEST_CASE("structural equality ignores ids but not token order") {
  auto a = parse_grammar("tokens { A : /a/ ; B : /b/ ; }\nr : A B ;");
  auto b = parse_grammar("// comment\ntokens { A : /a/ ; B : /b/ ; }\n\n\nr :   A   B ;");
  auto c = parse_grammar("tokens { B : /b/ ; A : /a/ ; }\nr : A B ;");
  CHECK(structurally_equal(a, b));
  CHECK_FALSE(structurally_equal(a, c));
  CHECK_FALSE(structurally_equal(a, parse_grammar("tokens { A : /a/ ; B : /b/ ; }\nr : B A ;")));
}
