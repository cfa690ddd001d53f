#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aspect.hpp"
#include "grammar.hpp"

namespace gw {

struct MatchResult {
  std::size_t block = 0;
  NodeId rule;
  NodeId production;
  // Explicit binders plus the implicit `rule` and `grammar`.
  std::map<std::string, NodeId> bindings;
  // [begin, end) term positions covered by each top-level pattern element.
  std::vector<std::pair<std::size_t, std::size_t>> element_spans;

  bool operator==(const MatchResult&) const = default;
};

/// All matches of a pointcut, in rule order then production order. Distinct
/// binding sets within one production are reported separately; assignments
/// that only differ in gap extents collapse to the first (leftmost,
/// non-greedy) one.
std::vector<MatchResult> match_pointcut(const Grammar& g, const Pointcut& pc,
                                        std::size_t block_index = 0);

/// Resolves `@name` against a match (explicit binders, then `rule` and
/// `grammar`, then the unique occurrence of the symbol in the matched
/// production). Throws E_AMBIGUOUS_REF / E_UNKNOWN_REF.
NodeId resolve_reference(const Grammar& g, const MatchResult& m, const Reference& ref);

struct TraceRecord {
  std::string aspect;
  std::size_t block = 0;
  std::string verb;  // before | after | instead | remove | add
  NodeId target;
  std::string target_path;
  // Every node created by the action, pre-order; the first `top_level_created`
  // entries are the direct replacements/insertions.
  std::vector<NodeId> created;
  std::vector<std::string> new_paths;
  std::size_t top_level_created = 0;
  // The retired subtree, pre-order, target first (instead/remove only).
  std::vector<NodeId> removed;
  std::vector<std::string> removed_paths;
};

using WeaveTrace = std::vector<TraceRecord>;

std::string trace_record_to_json(const TraceRecord& r);
std::string trace_to_jsonl(const WeaveTrace& trace);

struct ApplyResult {
  Grammar grammar;
  std::vector<TraceRecord> records;
};

/// Applies one action at one match. Throws E_AMBIGUOUS_REF, E_UNKNOWN_REF,
/// E_FRAGMENT_KIND, E_EMPTY_RULE, E_EMPTY_GROUP, fragment syntax errors.
ApplyResult apply_action(const Grammar& g, const MatchResult& m, const Action& a,
                         const std::string& aspect_name = "<aspect>");

struct WeaveResult {
  Grammar grammar;
  WeaveTrace trace;
};

/// Applies aspects in order; each sees the previous result. Throws
/// DiagnosticError carrying every error found for the failing aspect.
WeaveResult weave(const Grammar& g, const std::vector<SyntacticAspect>& aspects);

}  // namespace gw
