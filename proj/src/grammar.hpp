#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diagnostic.hpp"

namespace gw {

/// Identity of a grammar object. Unique within one grammar session and never
/// reused; 0 means "no node".
struct NodeId {
  std::uint64_t value = 0;

  explicit operator bool() const { return value != 0; }
  auto operator<=>(const NodeId&) const = default;
};

std::string to_string(NodeId id);

enum class Repetition { One, Star, Plus, Opt };

std::string_view repetition_suffix(Repetition rep);

struct Term;

struct TokenRef {
  std::string name;
};

struct LiteralRef {
  std::string text;
};

struct RuleRef {
  std::string name;
};

struct Group {
  std::vector<Term> body;
  Repetition rep = Repetition::One;
};

struct Term {
  NodeId id;
  std::variant<TokenRef, LiteralRef, RuleRef, Group> kind;
  SourceSpan span;
  // Set on copies made by desugar_groups: the term this one was cloned from.
  NodeId origin;

  bool is_token() const { return std::holds_alternative<TokenRef>(kind); }
  bool is_literal() const { return std::holds_alternative<LiteralRef>(kind); }
  bool is_rule_ref() const { return std::holds_alternative<RuleRef>(kind); }
  bool is_group() const { return std::holds_alternative<Group>(kind); }

  const Group* group() const { return std::get_if<Group>(&kind); }
  Group* group() { return std::get_if<Group>(&kind); }

  // Token name, literal text or rule name; empty for groups.
  const std::string& symbol() const;

  // The identity this term carries in the pre-desugaring grammar.
  NodeId source_id() const { return origin ? origin : id; }
};

struct Production {
  NodeId id;
  std::vector<Term> terms;  // empty == epsilon
  SourceSpan span;
};

struct Rule {
  NodeId id;
  std::string name;
  std::vector<Production> productions;
  SourceSpan span;
  // Non-zero for rules introduced by desugar_groups: the group they replace.
  NodeId synthetic_from;
  Repetition synthetic_rep = Repetition::One;

  bool synthetic() const { return static_cast<bool>(synthetic_from); }
};

struct TokenDef {
  NodeId id;
  std::string name;
  std::string pattern;
  bool skip = false;
  SourceSpan span;
};

struct Grammar {
  NodeId root_id;
  std::vector<TokenDef> tokens;
  std::vector<Rule> rules;
  std::uint64_t next_node_id = 1;

  NodeId new_id() { return NodeId{next_node_id++}; }

  const Rule* find_rule(std::string_view name) const;
  Rule* find_rule(std::string_view name);
  const TokenDef* find_token(std::string_view name) const;
};

bool is_rule_name(std::string_view s);
bool is_token_name(std::string_view s);

// ---------------------------------------------------------------------------
// Addressing

enum class NodeKind { Grammar, Rule, Production, Term };

std::string_view node_kind_name(NodeKind k);

/// Structured form of an ObjectPath: `rule[.pN](.tN)*` or `$grammar`.
struct NodeLocation {
  NodeKind kind = NodeKind::Grammar;
  std::size_t rule = 0;
  std::size_t production = 0;
  std::vector<std::size_t> terms;  // descending through group bodies

  bool operator==(const NodeLocation&) const = default;
};

struct NodeRef {
  NodeKind kind = NodeKind::Grammar;
  const Rule* rule = nullptr;
  const Production* production = nullptr;
  const Term* term = nullptr;

  NodeId id(const Grammar& g) const;
};

/// Parses and bounds-checks a path; throws DiagnosticError(E_BAD_PATH).
NodeLocation parse_path(const Grammar& g, std::string_view path);
std::string format_path(const Grammar& g, const NodeLocation& loc);

std::optional<NodeLocation> locate(const Grammar& g, NodeId id);
NodeRef deref(const Grammar& g, const NodeLocation& loc);

NodeRef resolve_path(const Grammar& g, std::string_view path);
std::optional<std::string> path_of(const Grammar& g, NodeId id);

// Mutable access for the weaver; the location must be valid.
Rule& rule_at(Grammar& g, const NodeLocation& loc);
Production& production_at(Grammar& g, const NodeLocation& loc);
Term& term_at(Grammar& g, const NodeLocation& loc);
// The term list holding the located term (a production's terms or a group body).
std::vector<Term>& term_container(Grammar& g, const NodeLocation& loc);

/// Visits every rule, production and term in document order (pre-order).
/// The grammar root is not visited.
void for_each_node(const Grammar& g,
                   const std::function<void(const NodeLocation&, NodeId)>& visit);

/// Ids of `term` and everything nested inside it, pre-order.
void collect_ids(const Term& term, std::vector<NodeId>& out);
void collect_ids(const Production& p, std::vector<NodeId>& out);
void collect_ids(const Rule& r, std::vector<NodeId>& out);

// ---------------------------------------------------------------------------
// Operations

Diagnostics check_well_formed(const Grammar& g);

std::string pretty_print(const Grammar& g);
std::string print_terms(const std::vector<Term>& terms);
std::string quote_literal(std::string_view text);

/// Structural equality: NodeIds, spans and desugaring origins are ignored;
/// token definition order is significant.
bool structurally_equal(const Grammar& a, const Grammar& b);
bool structurally_equal(const Term& a, const Term& b);
bool structurally_equal(const Production& a, const Production& b);
bool structurally_equal(const Rule& a, const Rule& b);

/// Replaces every Group by a reference to a synthetic rule `<rule>%g<k>`.
Grammar desugar_groups(const Grammar& g);

}  // namespace gw

template <>
struct std::hash<gw::NodeId> {
  std::size_t operator()(const gw::NodeId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
