#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "aspect.hpp"
#include "diagnostic.hpp"
#include "grammar.hpp"
#include "weaver.hpp"

namespace gw {

struct MetaEntry {
  MetaValue value;
  std::string provenance;  // "<aspect>#<block>"

  bool operator==(const MetaEntry&) const = default;
};

/// NodeId -> (key -> value). One "entry" is one (NodeId, key) pair.
class MetadataStore {
 public:
  using KeyMap = std::map<std::string, MetaEntry>;

  const MetaValue* get(NodeId id, const std::string& key) const;
  const KeyMap* entries_for(NodeId id) const;

  // Inserts or overwrites without conflict checking.
  void set(NodeId id, const std::string& key, MetaEntry entry);
  void erase(NodeId id);

  std::size_t entry_count() const;
  bool empty() const { return entries_.empty(); }

  const std::map<NodeId, KeyMap>& entries() const { return entries_; }

  bool operator==(const MetadataStore&) const = default;

 private:
  std::map<NodeId, KeyMap> entries_;
};

struct IntegrityReport {
  Diagnostics findings;

  bool empty() const { return findings.empty(); }
  std::size_t count(const std::string& code) const;
};

/// Throws DiagnosticError: E_NO_MATCH, E_AMBIGUOUS_REF, E_UNKNOWN_REF,
/// E_META_CONFLICT. The input store is never modified.
MetadataStore apply_metadata_aspect(const Grammar& g, const MetadataStore& store,
                                    const MetadataAspect& aspect);

struct MigrationResult {
  MetadataStore store;
  IntegrityReport report;
};

/// Moves entries of replaced nodes to the first node of their replacement
/// and drops (and reports) entries of removed nodes.
MigrationResult migrate(const MetadataStore& store, const WeaveTrace& trace);

IntegrityReport check_integrity(const Grammar& g, const MetadataStore& store);

/// JSON object mapping ObjectPath -> {key: value}; paths and keys sorted.
/// Entries whose node is gone are listed under "#<id>".
std::string dump_metadata_json(const Grammar& g, const MetadataStore& store);

}  // namespace gw
