#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diagnostic.hpp"
#include "grammar.hpp"

namespace gw {

// ---------------------------------------------------------------------------
// Pointcuts

struct TermPattern {
  enum class Kind { Token, Literal, Rule, AnyOne, Gap, Group };

  Kind kind = Kind::AnyOne;
  std::string text;                // token name, literal text or rule name
  std::vector<TermPattern> body;   // Group only
  Repetition rep = Repetition::One;
  std::string binder;              // `$name=`; never set on Gap
  SourceSpan span;
};

struct ProductionPattern {
  std::vector<TermPattern> elements;  // anchored at both ends
};

/// `[?] selector [$binder=] |: pattern`
struct Pointcut {
  std::string rule_selector;  // rule name or "*"
  bool optional = false;
  std::string binder;         // binds the matched production
  ProductionPattern pattern;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Syntactic aspects

enum class Verb { Before, After, Instead, Remove };

std::string_view verb_name(Verb v);

/// `@name`, `@TOKEN` or `@'literal'`.
struct Reference {
  bool literal = false;
  std::string name;
  SourceSpan span;
};

struct Fragment {
  std::string text;  // raw text between << and >>
  SourceSpan span;   // starts at the first character after <<
};

struct Action {
  Reference target;
  Verb verb = Verb::Instead;
  std::optional<Fragment> fragment;
  SourceSpan span;
};

struct MatchBlock {
  Pointcut pointcut;
  std::vector<Action> actions;
};

struct AddDirective {
  Fragment fragment;
  SourceSpan span;
};

using Directive = std::variant<MatchBlock, AddDirective>;

struct SyntacticAspect {
  std::string name;
  std::vector<Directive> directives;
};

// ---------------------------------------------------------------------------
// Metadata aspects

struct Identifier {
  std::string name;
  bool operator==(const Identifier&) const = default;
};

using MetaValue = std::variant<std::string, std::int64_t, bool, Identifier>;

std::string_view meta_type_name(const MetaValue& v);
std::string format_meta_value(const MetaValue& v);

struct MetaAssignment {
  Reference target;
  std::string key;
  MetaValue value;
  SourceSpan span;
};

struct MetaBlock {
  Pointcut pointcut;
  std::vector<MetaAssignment> assignments;
};

struct MetadataAspect {
  std::string name;
  std::vector<MetaBlock> blocks;
};

// ---------------------------------------------------------------------------

/// Throws DiagnosticError: E_SYNTAX, E_FRAGMENT_EMPTY, E_VERB_ARITY, E_DUP_BINDER.
SyntacticAspect parse_syntactic_aspect(std::string_view text, const std::string& name = "<aspect>");

/// Throws DiagnosticError: E_SYNTAX, E_BAD_VALUE, E_DUP_BINDER.
MetadataAspect parse_metadata_aspect(std::string_view text, const std::string& name = "<aspect>");

// Debug form that reparses to a structurally equal aspect.
std::string to_source(const SyntacticAspect& a);
std::string to_source(const MetadataAspect& a);
std::string to_source(const Pointcut& p);

// Structural equality (spans ignored).
bool structurally_equal(const SyntacticAspect& a, const SyntacticAspect& b);
bool structurally_equal(const MetadataAspect& a, const MetadataAspect& b);

}  // namespace gw
