#include "metadata.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace gw {

const MetaValue* MetadataStore::get(NodeId id, const std::string& key) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return nullptr;
  auto kt = it->second.find(key);
  return kt == it->second.end() ? nullptr : &kt->second.value;
}

const MetadataStore::KeyMap* MetadataStore::entries_for(NodeId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

void MetadataStore::set(NodeId id, const std::string& key, MetaEntry entry) {
  entries_[id][key] = std::move(entry);
}

void MetadataStore::erase(NodeId id) { entries_.erase(id); }

std::size_t MetadataStore::entry_count() const {
  std::size_t n = 0;
  for (const auto& [id, keys] : entries_) n += keys.size();
  return n;
}

std::size_t IntegrityReport::count(const std::string& code) const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

// ---------------------------------------------------------------------------

MetadataStore apply_metadata_aspect(const Grammar& g, const MetadataStore& store,
                                    const MetadataAspect& aspect) {
  MetadataStore out = store;
  Diagnostics errors;
  for (std::size_t b = 0; b < aspect.blocks.size(); ++b) {
    const MetaBlock& mb = aspect.blocks[b];
    auto matches = match_pointcut(g, mb.pointcut, b);
    if (matches.empty() && !mb.pointcut.optional) {
      errors.push_back(make_error("E_NO_MATCH",
                                  "block " + std::to_string(b) + " (" + to_source(mb.pointcut) +
                                      ") matches nothing",
                                  mb.pointcut.span));
      continue;
    }
    std::string provenance = aspect.name + "#" + std::to_string(b);
    for (const MatchResult& m : matches) {
      for (const MetaAssignment& as : mb.assignments) {
        NodeId target;
        try {
          target = resolve_reference(g, m, as.target);
        } catch (const DiagnosticError& e) {
          errors.insert(errors.end(), e.diagnostics().begin(), e.diagnostics().end());
          continue;
        }
        if (const MetaValue* old = out.get(target, as.key)) {
          if (*old == as.value) continue;
          auto path = path_of(g, target).value_or(to_string(target));
          errors.push_back(make_error("E_META_CONFLICT",
                                      "'" + as.key + "' on " + path + " is already " +
                                          format_meta_value(*old) + ", cannot set " +
                                          format_meta_value(as.value),
                                      as.span, path));
          continue;
        }
        out.set(target, as.key, MetaEntry{as.value, provenance});
      }
    }
  }
  if (!errors.empty()) throw DiagnosticError(std::move(errors));
  return out;
}

MigrationResult migrate(const MetadataStore& store, const WeaveTrace& trace) {
  MigrationResult out{store, {}};
  MetadataStore& s = out.store;
  for (const TraceRecord& rec : trace) {
    for (std::size_t i = 0; i < rec.removed.size(); ++i) {
      NodeId id = rec.removed[i];
      const auto* keys = s.entries_for(id);
      if (!keys) continue;
      std::string path = i < rec.removed_paths.size() ? rec.removed_paths[i] : to_string(id);
      bool moves = rec.verb == "instead" && id == rec.target && !rec.created.empty();
      if (moves) {
        NodeId dest = rec.created.front();
        std::string dest_path = rec.new_paths.empty() ? to_string(dest) : rec.new_paths.front();
        for (const auto& [key, entry] : *keys) s.set(dest, key, entry);
        if (rec.top_level_created > 1)
          out.report.findings.push_back(make_notice(
              "N_META_SPLIT",
              "metadata of " + path + " moved to " + dest_path + ", the first of " +
                  std::to_string(rec.top_level_created) + " replacement nodes",
              {}, dest_path));
      } else {
        for (const auto& [key, entry] : *keys)
          out.report.findings.push_back(make_warning(
              "W_META_DROPPED",
              "'" + key + "' on " + path + " dropped: node removed by " + rec.verb + " (" +
                  rec.aspect + " block " + std::to_string(rec.block) + ")",
              {}, path));
      }
      s.erase(id);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrity

namespace {

struct SchemaRule {
  const char* key;
  std::size_t type_index;  // MetaValue alternative
  const char* type_name;
  NodeKind kind;
  bool group_only;
};

constexpr SchemaRule kSchema[] = {
    {"ast.node", 0, "string", NodeKind::Production, false},
    {"ast.role", 0, "string", NodeKind::Term, false},
    {"ast.skip", 2, "boolean", NodeKind::Term, false},
    {"ast.list", 2, "boolean", NodeKind::Term, true},
};

void check_roles(const Grammar& g, const MetadataStore& store, const std::vector<Term>& terms,
                 NodeLocation& loc, Diagnostics& out) {
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    loc.terms.push_back(i);
    if (const auto* v = store.get(terms[i].id, "ast.role"))
      if (const auto* role = std::get_if<std::string>(v)) {
        auto [it, fresh] = seen.emplace(*role, i);
        if (!fresh)
          out.push_back(make_warning("W_DUP_ROLE",
                                     "role '" + *role + "' used by more than one sibling",
                                     terms[i].span, format_path(g, loc)));
      }
    if (const Group* grp = terms[i].group()) check_roles(g, store, grp->body, loc, out);
    loc.terms.pop_back();
  }
}

}  // namespace

IntegrityReport check_integrity(const Grammar& g, const MetadataStore& store) {
  IntegrityReport rep;
  for (const auto& [id, keys] : store.entries()) {
    auto loc = locate(g, id);
    if (!loc) {
      for (const auto& [key, entry] : keys)
        rep.findings.push_back(make_error(
            "E_DANGLING", "'" + key + "' is attached to " + to_string(id) +
                              ", which is not in the grammar (written by " + entry.provenance + ")",
            {}, to_string(id)));
      continue;
    }
    NodeRef ref = deref(g, *loc);
    std::string path = format_path(g, *loc);
    for (const auto& [key, entry] : keys) {
      if (key.rfind("ast.", 0) != 0) continue;
      const SchemaRule* rule = nullptr;
      for (const SchemaRule& r : kSchema)
        if (key == r.key) rule = &r;
      if (!rule) {
        rep.findings.push_back(make_warning("W_UNKNOWN_KEY", "unknown reserved key '" + key + "'",
                                            {}, path));
        continue;
      }
      if (entry.value.index() != rule->type_index)
        rep.findings.push_back(make_error("E_SCHEMA",
                                          "'" + key + "' must be a " + rule->type_name + ", got " +
                                              std::string(meta_type_name(entry.value)),
                                          {}, path));
      bool kind_ok = loc->kind == rule->kind && (!rule->group_only || ref.term->is_group());
      if (!kind_ok)
        rep.findings.push_back(make_error(
            "E_SCHEMA",
            "'" + key + "' belongs on a " + (rule->group_only ? "group term" : std::string(node_kind_name(rule->kind))) +
                ", not a " + std::string(node_kind_name(loc->kind)),
            {}, path));
    }
  }
  for (std::size_t r = 0; r < g.rules.size(); ++r)
    for (std::size_t p = 0; p < g.rules[r].productions.size(); ++p) {
      NodeLocation loc{NodeKind::Term, r, p, {}};
      check_roles(g, store, g.rules[r].productions[p].terms, loc, rep.findings);
    }
  return rep;
}

std::string dump_metadata_json(const Grammar& g, const MetadataStore& store) {
  std::map<std::string, nlohmann::ordered_json> by_path;
  for (const auto& [id, keys] : store.entries()) {
    std::string path = path_of(g, id).value_or(to_string(id));
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [key, entry] : keys) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, Identifier>)
              obj[key] = v.name;
            else
              obj[key] = v;
          },
          entry.value);
    }
    by_path[path] = std::move(obj);
  }
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (auto& [path, obj] : by_path) out[path] = std::move(obj);
  return out.dump(2) + "\n";
}

}  // namespace gw
