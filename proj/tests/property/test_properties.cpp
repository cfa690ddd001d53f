#include <random>
#include <set>

#include "doctest.h"
#include "aspect.hpp"
#include "ast.hpp"
#include "derivation_oracle.hpp"
#include "earley.hpp"
#include "lexer.hpp"
#include "metadata.hpp"
#include "random_grammar.hpp"
#include "test_util.hpp"
#include "weaver.hpp"

using namespace gw;
using namespace gwtest;

namespace {

constexpr std::uint64_t kSeed = 0x5eed2024;

std::vector<NodeId> all_ids(const Grammar& g) {
  std::vector<NodeId> ids{g.root_id};
  for (const auto& t : g.tokens) ids.push_back(t.id);
  for_each_node(g, [&](const NodeLocation&, NodeId id) { ids.push_back(id); });
  return ids;
}

bool has_groups(const std::vector<Term>& ts) {
  for (const Term& t : ts)
    if (t.is_group()) return true;
  return false;
}

}  // namespace

TEST_CASE("print then parse is the identity") {
  std::mt19937_64 rng(kSeed);
  for (int i = 0; i < 150; ++i) {
    CAPTURE(i);
    Grammar g = random_grammar(rng);
    REQUIRE(check_well_formed(g).empty());
    std::string text = pretty_print(g);
    CAPTURE(text);
    Grammar back = parse_grammar(text);
    CHECK(structurally_equal(g, back));
    CHECK(pretty_print(back) == text);
    CHECK(pretty_print(g) == text);
  }
}

TEST_CASE("weaving nothing is the identity") {
  std::mt19937_64 rng(kSeed + 1);
  for (int i = 0; i < 120; ++i) {
    Grammar g = random_grammar(rng);
    auto w = weave(g, {});
    CHECK(structurally_equal(g, w.grammar));
    auto w2 = weave(g, {parse_syntactic_aspect("// no directives\n")});
    CHECK(structurally_equal(g, w2.grammar));
    CHECK(w2.trace.empty());
    CHECK(all_ids(w2.grammar) == all_ids(g));
  }
}

TEST_CASE("paths round trip and ids are unique, also after desugaring") {
  std::mt19937_64 rng(kSeed + 2);
  for (int i = 0; i < 100; ++i) {
    Grammar g = random_grammar(rng);
    for_each_node(g, [&](const NodeLocation& loc, NodeId id) {
      auto p = path_of(g, id);
      REQUIRE(p.has_value());
      CHECK(parse_path(g, *p) == loc);
      CHECK(resolve_path(g, *p).id(g) == id);
    });
    Grammar d = desugar_groups(g);
    auto ids = all_ids(d);
    std::set<NodeId> unique(ids.begin(), ids.end());
    CHECK(unique.size() == ids.size());
    CHECK(check_well_formed(d).empty());
    for (const Rule& r : d.rules)
      for (const Production& p : r.productions) CHECK_FALSE(has_groups(p.terms));
  }
}

TEST_CASE("Earley recognition agrees with the derivation oracle") {
  std::mt19937_64 rng(kSeed + 3);
  GrammarShape shape;
  shape.tokens = {"A"};
  shape.literals = {"x", "y"};
  auto strings = all_strings(alphabet(shape), 6);
  std::size_t accepted = 0;
  for (int i = 0; i < 40; ++i) {
    CAPTURE(i);
    Grammar g = random_grammar(rng, shape);
    CAPTURE(pretty_print(g));
    Grammar d = desugar_groups(g);
    EarleyParser parser(g);
    const std::string start = g.rules.front().name;
    for (const auto& s : strings) {
      bool expected = derives(g, start, s);
      auto tokens = to_tokens(s);
      bool got = parser.recognize(start, tokens);
      if (got != expected) {
        std::string in;
        for (const auto& t : s) in += (t.literal ? "'" + t.name + "'" : t.name) + " ";
        CAPTURE(in);
        CHECK(got == expected);
      }
      // the desugared grammar derives the same language
      CHECK(derives(d, start, s) == expected);
      if (!expected) continue;
      ++accepted;
      auto out = parser.parse(start, tokens);
      CHECK(leaf_yield(out.tree) == tokens);
      CHECK(node_count(build_ast(g, out.tree, {})) <= node_count(out.tree));
    }
  }
  MESSAGE("accepted strings: " << accepted);
  CHECK(accepted > 0);
}

TEST_CASE("parsing is deterministic under ambiguity") {
  std::mt19937_64 rng(kSeed + 4);
  GrammarShape shape;
  auto strings = all_strings(alphabet(shape), 4);
  for (int i = 0; i < 20; ++i) {
    Grammar g = random_grammar(rng, shape);
    EarleyParser a(g);
    EarleyParser b(g);
    const std::string start = g.rules.front().name;
    for (const auto& s : strings) {
      auto tokens = to_tokens(s);
      if (!a.recognize(start, tokens)) continue;
      auto x = a.parse(start, tokens);
      auto y = b.parse(start, tokens);
      CHECK(tree_to_json(x.tree) == tree_to_json(y.tree));
      CHECK(codes(x.diagnostics) == codes(y.diagnostics));
    }
  }
}

TEST_CASE("frame, trace soundness and effect counting") {
  std::mt19937_64 rng(kSeed + 5);
  for (int i = 0; i < 100; ++i) {
    CAPTURE(i);
    Grammar g = random_grammar(rng);
    const std::string rule = g.rules[rng() % g.rules.size()].name;
    std::string src = "? " + rule + " |: .. $t=_ .. @t.instead = << 'z' A >> ;";
    auto aspect = parse_syntactic_aspect(src, "p");
    auto ms = match_pointcut(g, std::get<MatchBlock>(aspect.directives[0]).pointcut);
    auto w = weave(g, {aspect});

    std::size_t insteads = 0;
    std::set<NodeId> removed;
    for (const auto& rec : w.trace) {
      insteads += rec.verb == "instead";
      for (NodeId id : rec.removed) {
        CHECK(locate(g, id).has_value());
        CHECK_FALSE(locate(w.grammar, id).has_value());
        removed.insert(id);
      }
      for (NodeId id : rec.created) CHECK(locate(w.grammar, id).has_value());
      CHECK(rec.top_level_created == 2);
    }
    CHECK(insteads == ms.size());

    for_each_node(g, [&](const NodeLocation& loc, NodeId id) {
      if (removed.count(id)) return;
      auto after = locate(w.grammar, id);
      REQUIRE(after.has_value());
      if (loc.kind != NodeKind::Term) return;
      std::vector<NodeId> sub;
      collect_ids(*deref(g, loc).term, sub);
      bool touched = false;
      for (NodeId s : sub) touched |= removed.count(s) != 0;
      if (!touched) CHECK(structurally_equal(*deref(g, loc).term, *deref(w.grammar, *after).term));
    });
  }
}

TEST_CASE("migration accounting") {
  std::mt19937_64 rng(kSeed + 6);
  for (int i = 0; i < 60; ++i) {
    CAPTURE(i);
    Grammar g = random_grammar(rng);
    auto meta = parse_metadata_aspect(
        "* $p=|: .. @p.meta[\"k\"] = 1 ;\n? * |: .. $t=_ .. @t.meta[\"t\"] = true ;", "m");
    MetadataStore s = apply_metadata_aspect(g, {}, meta);
    const std::string rule = g.rules[rng() % g.rules.size()].name;
    std::string src = (i % 2 ? "? " + rule + " |: .. $t=_ .. @t.instead = << 'z' >> ;"
                             : "? " + rule + " $p=|: .. @p.remove ;");
    // removing every production empties the rule; only keep weaves that succeed
    WeaveResult w;
    try {
      w = weave(g, {parse_syntactic_aspect(src, "p")});
    } catch (const DiagnosticError&) {
      continue;
    }
    std::set<NodeId> retired;
    for (const auto& rec : w.trace) retired.insert(rec.removed.begin(), rec.removed.end());
    std::size_t on_retired = 0;
    for (const auto& [id, keys] : s.entries())
      if (retired.count(id)) on_retired += keys.size();

    auto unmigrated = check_integrity(w.grammar, s);
    CHECK(unmigrated.count("E_DANGLING") == on_retired);

    auto m = migrate(s, w.trace);
    std::size_t dropped = m.report.count("W_META_DROPPED");
    CHECK(m.store.entry_count() == s.entry_count() - dropped);
    CHECK(check_integrity(w.grammar, m.store).count("E_DANGLING") == 0);
    CHECK(migrate(m.store, {}).store == m.store);
  }
}

TEST_CASE("lexemes reconstruct the input") {
  Grammar g = base_grammar();
  Lexer lexer(g);
  std::mt19937_64 rng(kSeed + 7);
  const std::string alphabet = "0123456789.+*() \nabxyz_";
  for (int i = 0; i < 500; ++i) {
    std::string in;
    std::size_t n = rng() % 24;
    for (std::size_t k = 0; k < n; ++k) in += alphabet[rng() % alphabet.size()];
    std::vector<Token> all;
    try {
      all = lexer.lex_all(in);
    } catch (const DiagnosticError& e) {
      CHECK(e.diagnostics().at(0).code == "E_LEX");
      continue;
    }
    std::string joined;
    for (const Token& t : all) joined += t.lexeme;
    CHECK(joined == in);
  }
}

TEST_CASE("readers never crash on arbitrary bytes") {
  std::mt19937_64 rng(kSeed + 8);
  const std::string pieces[] = {"a", "B", ":", ";", "'", "(", ")", "*", "+", "?", " ", "\n",
                                "tokens", "{", "}", "/", "\\", "$", "=", "|:", "@", ".", "<<",
                                ">>", "_", "..", "[", "]", "\"", "7", "meta", "instead", "//"};
  for (int i = 0; i < 3000; ++i) {
    std::string in;
    std::size_t n = rng() % 20;
    for (std::size_t k = 0; k < n; ++k) in += pieces[rng() % std::size(pieces)];
    if (rng() % 4 == 0) in += static_cast<char>(rng() % 256);
    int lines = 1 + static_cast<int>(std::count(in.begin(), in.end(), '\n'));
    auto check = [&](auto&& f) {
      try {
        f();
      } catch (const DiagnosticError& e) {
        for (const auto& d : e.diagnostics()) {
          CHECK(d.span.start_line >= 1);
          CHECK(d.span.start_line <= lines);
        }
      }
    };
    check([&] { parse_grammar(in); });
    check([&] { parse_syntactic_aspect(in); });
    check([&] { parse_metadata_aspect(in); });
  }
}

TEST_CASE("aspect debug form round trips") {
  std::mt19937_64 rng(kSeed + 9);
  const std::string elements[] = {"A", "B", "'x'", "r1", "_", "..", "('y' ..)*", "(A)+", "(r0 _)?"};
  const std::string verbs[] = {".remove", ".instead = << A >>", ".before = << 'q' >>",
                               ".after = << B r0 >>"};
  for (int i = 0; i < 200; ++i) {
    std::string src;
    int blocks = 1 + static_cast<int>(rng() % 3);
    for (int b = 0; b < blocks; ++b) {
      if (rng() % 5 == 0) src += "add << extra" + std::to_string(b) + " : 'w' ; >>\n";
      src += (rng() % 2 ? "? " : "") + std::string(rng() % 2 ? "*" : "r0") + " $p=|: ";
      int n = static_cast<int>(rng() % 4);
      for (int k = 0; k < n; ++k) {
        if (k == 0 && rng() % 2) src += "$b=";
        std::string el = elements[rng() % std::size(elements)];
        if (k == 0 && el == "..") el = "_";
        src += el + " ";
      }
      src += "@p" + verbs[rng() % std::size(verbs)] + " ;\n";
    }
    CAPTURE(src);
    auto a = parse_syntactic_aspect(src, "r");
    auto b = parse_syntactic_aspect(to_source(a), "r");
    CHECK(structurally_equal(a, b));
  }
}
