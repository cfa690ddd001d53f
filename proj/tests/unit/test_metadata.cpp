#include "doctest.h"
#include "aspect.hpp"
#include "metadata.hpp"
#include "test_util.hpp"
#include "weaver.hpp"

using namespace gw;
using gwtest::codes;
using gwtest::thrown_codes;

namespace {

Grammar dialect() {
  auto g = gwtest::base_grammar();
  return weave(g, {parse_syntactic_aspect(gwtest::data("intvars.gaspect"), "intvars")}).grammar;
}

MetadataStore apply(const Grammar& g, const MetadataStore& s, const std::string& src,
                    const std::string& name = "m") {
  return apply_metadata_aspect(g, s, parse_metadata_aspect(src, name));
}

NodeId id_at(const Grammar& g, const std::string& path) { return resolve_path(g, path).id(g); }

}  // namespace

TEST_CASE("assignment lands on the matched production") {
  auto g = dialect();
  auto s = apply(g, {}, "factor $p=|: INT @p.meta[\"ast.node\"]=\"NumberLiteral\";", "num");
  CHECK(s.entry_count() == 1);
  const MetaValue* v = s.get(id_at(g, "factor.p0"), "ast.node");
  REQUIRE(v);
  CHECK(*v == MetaValue{std::string("NumberLiteral")});
  CHECK(s.entries().begin()->second.at("ast.node").provenance == "num#0");
}

TEST_CASE("reapplying is idempotent; a different value conflicts") {
  auto g = dialect();
  const std::string src = "factor $p=|: INT @p.meta[\"ast.node\"]=\"NumberLiteral\";";
  auto once = apply(g, {}, src);
  auto twice = apply(g, once, src);
  CHECK(once == twice);
  CHECK(thrown_codes([&] { apply(g, once, "factor $p=|: INT @p.meta[\"ast.node\"]=\"Other\";"); }) ==
        std::vector<std::string>{"E_META_CONFLICT"});
  CHECK(thrown_codes([&] { apply(g, once, "factor $p=|: INT @p.meta[\"ast.node\"]=1;"); }) ==
        std::vector<std::string>{"E_META_CONFLICT"});
}

TEST_CASE("metadata aspect errors") {
  auto g = dialect();
  CHECK(thrown_codes([&] { apply(g, {}, "factor |: REAL @rule.meta[\"k\"] = 1 ;"); }) ==
        std::vector<std::string>{"E_NO_MATCH"});
  CHECK(apply(g, {}, "? factor |: REAL @rule.meta[\"k\"] = 1 ;").empty());
  CHECK(thrown_codes([&] { apply(g, {}, "sum |: .. @mult.meta[\"k\"] = 1 ;"); }) ==
        std::vector<std::string>{"E_AMBIGUOUS_REF"});
}

TEST_CASE("rule, grammar and term targets") {
  auto g = dialect();
  auto s = apply(g, {},
                 "sum |: .. @rule.meta[\"a\"] = 1 @grammar.meta[\"b\"] = true @'+'.meta[\"c\"] = x ;");
  CHECK(s.get(id_at(g, "sum"), "a"));
  CHECK(s.get(g.root_id, "b"));
  CHECK(*s.get(id_at(g, "sum.p0.t1.t0"), "c") == MetaValue{Identifier{"x"}});
  CHECK(check_integrity(g, s).empty());
}

TEST_CASE("migration moves replaced-term entries to the replacement") {
  auto g = gwtest::base_grammar();
  auto s = apply(g, {}, "factor |: REAL @REAL.meta[\"note\"] = \"real\" ;");
  auto w = weave(g, {parse_syntactic_aspect(gwtest::data("intvars.gaspect"), "intvars")});
  auto m = migrate(s, w.trace);
  CHECK(m.report.empty());
  const MetaValue* v = m.store.get(id_at(w.grammar, "factor.p0.t0"), "note");
  REQUIRE(v);
  CHECK(*v == MetaValue{std::string("real")});
  CHECK(std::get<TokenRef>(resolve_path(w.grammar, "factor.p0.t0").term->kind).name == "INT");
  CHECK(check_integrity(w.grammar, m.store).empty());
}

TEST_CASE("migration with an empty trace is the identity") {
  auto g = gwtest::base_grammar();
  auto s = apply(g, {}, "* $p=|: .. @p.meta[\"k\"] = 1 ;");
  auto m = migrate(s, {});
  CHECK(m.store == s);
  CHECK(m.report.empty());
}

TEST_CASE("removed nodes drop their entries with a finding") {
  auto g = gwtest::base_grammar();
  auto s = apply(g, {}, "factor $p=|: '(' .. @p.meta[\"k\"] = 1 @p.meta[\"j\"] = 2 @sum.meta[\"t\"] = 3 ;");
  auto w = weave(g, {parse_syntactic_aspect("factor $p=|: '(' .. @p.remove ;", "rm")});
  auto m = migrate(s, w.trace);
  CHECK(codes(m.report.findings) ==
        std::vector<std::string>{"W_META_DROPPED", "W_META_DROPPED", "W_META_DROPPED"});
  CHECK(m.store.entry_count() == s.entry_count() - 3);
  CHECK(check_integrity(w.grammar, m.store).empty());
}

TEST_CASE("one-to-many replacement keeps entries on the first node") {
  auto g = gwtest::base_grammar();
  auto s = apply(g, {}, "factor |: REAL @REAL.meta[\"k\"] = 1 ;");
  auto w = weave(g, {parse_syntactic_aspect("factor |: REAL @REAL.instead = << '-' REAL >> ;", "x")});
  auto m = migrate(s, w.trace);
  CHECK(codes(m.report.findings) == std::vector<std::string>{"N_META_SPLIT"});
  CHECK(m.store.get(id_at(w.grammar, "factor.p0.t0"), "k"));
  CHECK(m.store.entry_count() == 1);
}

TEST_CASE("production replacement migrates to the first new production") {
  auto g = gwtest::base_grammar();
  auto s = apply(g, {}, "factor $p=|: REAL @p.meta[\"ast.node\"] = \"N\" @REAL.meta[\"t\"] = 1 ;");
  auto w = weave(g, {parse_syntactic_aspect("factor $p=|: REAL @p.instead = << : INT >> ;", "x")});
  auto m = migrate(s, w.trace);
  CHECK(m.store.get(id_at(w.grammar, "factor.p0"), "ast.node"));
  // the REAL term went away with its production
  CHECK(codes(m.report.findings) == std::vector<std::string>{"W_META_DROPPED"});
}

TEST_CASE("without migration exactly the replaced entries dangle") {
  auto g = gwtest::base_grammar();
  auto s = apply(g, {}, "* $p=|: .. @p.meta[\"k\"] = 1 ;\nfactor |: REAL @REAL.meta[\"t\"] = 2 ;");
  auto w = weave(g, {parse_syntactic_aspect(gwtest::data("intvars.gaspect"), "intvars")});
  auto rep = check_integrity(w.grammar, s);
  REQUIRE(rep.findings.size() == 1);
  CHECK(rep.findings[0].code == "E_DANGLING");
  CHECK(rep.findings[0].path == to_string(id_at(g, "factor.p0.t0")));
}

TEST_CASE("reserved schema") {
  auto g = dialect();
  CHECK(check_integrity(g, {}).empty());
  auto bad_type = apply(g, {}, "factor |: INT @INT.meta[\"ast.skip\"] = \"yes\" ;");
  CHECK(codes(check_integrity(g, bad_type).findings) == std::vector<std::string>{"E_SCHEMA"});

  auto bad_kind = apply(g, {}, "factor $p=|: INT @p.meta[\"ast.role\"] = \"r\" @INT.meta[\"ast.node\"] = \"N\" ;");
  CHECK(codes(check_integrity(g, bad_kind).findings) == std::vector<std::string>{"E_SCHEMA", "E_SCHEMA"});

  auto list_on_token = apply(g, {}, "factor |: INT @INT.meta[\"ast.list\"] = true ;");
  CHECK(codes(check_integrity(g, list_on_token).findings) == std::vector<std::string>{"E_SCHEMA"});

  auto list_on_group = apply(g, {}, "sum |: mult $g=(..)* @g.meta[\"ast.list\"] = true ;");
  CHECK(check_integrity(g, list_on_group).empty());

  auto unknown = apply(g, {}, "sum |: .. @rule.meta[\"ast.colour\"] = 1 @rule.meta[\"mine.x\"] = 2 ;");
  auto rep = check_integrity(g, unknown);
  CHECK(codes(rep.findings) == std::vector<std::string>{"W_UNKNOWN_KEY"});
  CHECK(rep.findings[0].severity == Severity::Warning);
}

TEST_CASE("duplicate roles among siblings") {
  auto g = parse_grammar("tokens { A : /a/ ; }\nr : A A ;");
  auto s = apply(g, {}, "r |: $x=A $y=A @x.meta[\"ast.role\"] = \"v\" @y.meta[\"ast.role\"] = \"v\" ;");
  auto rep = check_integrity(g, s);
  CHECK(codes(rep.findings) == std::vector<std::string>{"W_DUP_ROLE"});
  CHECK(rep.findings[0].path == "r.p0.t1");
}

TEST_CASE("metadata dump") {
  auto g = dialect();
  auto s = apply(g, {},
                 "mult |: .. @rule.meta[\"z\"] = 1 @rule.meta[\"a\"] = \"s\" ;\n"
                 "factor $p=|: INT @p.meta[\"k\"] = Ident @grammar.meta[\"b\"] = false ;");
  CHECK(dump_metadata_json(g, s) ==
        "{\n"
        "  \"$grammar\": {\n    \"b\": false\n  },\n"
        "  \"factor.p0\": {\n    \"k\": \"Ident\"\n  },\n"
        "  \"mult\": {\n    \"a\": \"s\",\n    \"z\": 1\n  }\n"
        "}\n");
  MetadataStore dangling;
  dangling.set(NodeId{999}, "k", MetaEntry{std::int64_t{1}, "x#0"});
  CHECK(dump_metadata_json(g, dangling) == "{\n  \"#999\": {\n    \"k\": 1\n  }\n}\n");
  CHECK(dump_metadata_json(g, {}) == "{}\n");
}
