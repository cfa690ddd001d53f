#include "grammarweave/grammarweave.h"

#include <cstdlib>
#include <cstring>
#include <deque>
#include <new>
#include <string>

#include "ast.hpp"
#include "aspect.hpp"
#include "earley.hpp"
#include "grammar_reader.hpp"
#include "json.hpp"
#include "lexer.hpp"
#include "metadata.hpp"
#include "weaver.hpp"

struct gw_context {
  gw::Diagnostics diags;
  std::string last_error;
};

struct gw_grammar {
  gw::Grammar g;
};

struct gw_metastore {
  gw::MetadataStore store;
};

struct gw_trace {
  gw::WeaveTrace trace;
};

namespace {

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size());
  p[s.size()] = '\0';
  return p;
}

std::string_view view(const char* text, size_t len) {
  return text ? std::string_view(text, len) : std::string_view();
}

std::string name_or(const char* name, const char* fallback) {
  return name && *name ? std::string(name) : std::string(fallback);
}

void add(gw_context* ctx, const gw::Diagnostics& ds) {
  if (ctx) ctx->diags.insert(ctx->diags.end(), ds.begin(), ds.end());
}

// Runs f, turning exceptions into status codes and context diagnostics.
template <class F>
gw_status guarded(gw_context* ctx, F&& f) {
  try {
    return f();
  } catch (const gw::DiagnosticError& e) {
    add(ctx, e.diagnostics());
    return GW_ERROR_DIAGNOSTICS;
  } catch (const std::exception& e) {
    if (ctx) ctx->last_error = e.what();
    return GW_ERROR_INTERNAL;
  } catch (...) {
    if (ctx) ctx->last_error = "unknown exception";
    return GW_ERROR_INTERNAL;
  }
}

gw_status report(gw_context* ctx, const gw::Diagnostics& ds) {
  add(ctx, ds);
  return gw::has_errors(ds) ? GW_ERROR_DIAGNOSTICS : GW_OK;
}

}  // namespace

extern "C" {

const char* gw_version(void) { return "0.1.0"; }

const char* gw_status_string(gw_status s) {
  switch (s) {
    case GW_OK: return "ok";
    case GW_ERROR_DIAGNOSTICS: return "diagnostics reported";
    case GW_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case GW_ERROR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void gw_string_free(char* s) { std::free(s); }

gw_context* gw_context_create(void) { return new (std::nothrow) gw_context(); }
void gw_context_destroy(gw_context* ctx) { delete ctx; }

size_t gw_diag_count(const gw_context* ctx) { return ctx ? ctx->diags.size() : 0; }

size_t gw_diag_error_count(const gw_context* ctx) {
  if (!ctx) return 0;
  size_t n = 0;
  for (const auto& d : ctx->diags) n += d.severity == gw::Severity::Error;
  return n;
}

gw_status gw_diag_get(const gw_context* ctx, size_t index, gw_diagnostic* out) {
  if (!ctx || !out || index >= ctx->diags.size()) return GW_ERROR_INVALID_ARGUMENT;
  const gw::Diagnostic& d = ctx->diags[index];
  out->severity = static_cast<gw_severity>(d.severity);
  out->code = d.code.c_str();
  out->message = d.message.c_str();
  out->file = d.span.file.c_str();
  out->line = d.span.start_line;
  out->col = d.span.start_col;
  out->end_line = d.span.end_line;
  out->end_col = d.span.end_col;
  out->path = d.path.c_str();
  return GW_OK;
}

gw_status gw_diag_format(const gw_context* ctx, size_t index, int as_json, char** out) {
  if (!ctx || !out || index >= ctx->diags.size()) return GW_ERROR_INVALID_ARGUMENT;
  const gw::Diagnostic& d = ctx->diags[index];
  return guarded(nullptr, [&] {
    *out = dup_string(as_json ? gw::diagnostic_to_json(d) : gw::format_diagnostic(d));
    return GW_OK;
  });
}

void gw_diag_clear(gw_context* ctx) {
  if (ctx) ctx->diags.clear();
}

const char* gw_last_error(const gw_context* ctx) { return ctx ? ctx->last_error.c_str() : ""; }

gw_status gw_grammar_parse(gw_context* ctx, const char* text, size_t len, const char* file_name,
                           gw_grammar** out) {
  if (!out || (!text && len)) return GW_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(ctx, [&] {
    auto g = std::make_unique<gw_grammar>();
    g->g = gw::parse_grammar(view(text, len), name_or(file_name, "<input>"));
    gw::Diagnostics ds = gw::check_well_formed(g->g);
    gw_status st = report(ctx, ds);
    if (st == GW_OK) *out = g.release();
    return st;
  });
}

void gw_grammar_destroy(gw_grammar* g) { delete g; }

gw_status gw_grammar_print(const gw_grammar* g, char** out) {
  if (!g || !out) return GW_ERROR_INVALID_ARGUMENT;
  return guarded(nullptr, [&] {
    *out = dup_string(gw::pretty_print(g->g));
    return GW_OK;
  });
}

gw_status gw_grammar_check(gw_context* ctx, const gw_grammar* g) {
  if (!g) return GW_ERROR_INVALID_ARGUMENT;
  return guarded(ctx, [&] { return report(ctx, gw::check_well_formed(g->g)); });
}

gw_status gw_weave_aspect(gw_context* ctx, const gw_grammar* in, const char* aspect_text,
                          size_t len, const char* aspect_name, gw_grammar** out,
                          gw_trace** trace) {
  if (!in || !out || (!aspect_text && len)) return GW_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  if (trace) *trace = nullptr;
  return guarded(ctx, [&] {
    auto aspect = gw::parse_syntactic_aspect(view(aspect_text, len), name_or(aspect_name, "<aspect>"));
    auto result = gw::weave(in->g, {aspect});
    auto g = std::make_unique<gw_grammar>();
    g->g = std::move(result.grammar);
    if (trace) *trace = new gw_trace{std::move(result.trace)};
    *out = g.release();
    return GW_OK;
  });
}

void gw_trace_destroy(gw_trace* t) { delete t; }

size_t gw_trace_size(const gw_trace* t) { return t ? t->trace.size() : 0; }

gw_status gw_trace_to_jsonl(const gw_trace* t, char** out) {
  if (!t || !out) return GW_ERROR_INVALID_ARGUMENT;
  return guarded(nullptr, [&] {
    *out = dup_string(gw::trace_to_jsonl(t->trace));
    return GW_OK;
  });
}

gw_status gw_match(gw_context* ctx, const gw_grammar* g, const char* aspect_text, size_t len,
                   const char* aspect_name, char** out) {
  if (!g || !out || (!aspect_text && len)) return GW_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(ctx, [&] {
    auto aspect = gw::parse_syntactic_aspect(view(aspect_text, len), name_or(aspect_name, "<aspect>"));
    std::string listing;
    gw::Diagnostics ds;
    std::size_t block = 0;
    for (const gw::Directive& d : aspect.directives) {
      const auto* mb = std::get_if<gw::MatchBlock>(&d);
      if (!mb) {
        ++block;
        continue;
      }
      auto matches = gw::match_pointcut(g->g, mb->pointcut, block);
      if (matches.empty() && !mb->pointcut.optional)
        ds.push_back(gw::make_error("E_NO_MATCH",
                                    "block " + std::to_string(block) + " (" +
                                        gw::to_source(mb->pointcut) + ") matches nothing",
                                    mb->pointcut.span));
      for (const gw::MatchResult& m : matches) {
        listing += std::to_string(block) + "\t" +
                   gw::path_of(g->g, m.production).value_or(gw::to_string(m.production));
        for (const auto& [name, id] : m.bindings) {
          if (name == "grammar") continue;
          listing += "\t" + name + "=" + gw::path_of(g->g, id).value_or(gw::to_string(id));
        }
        listing += "\n";
      }
      ++block;
    }
    gw_status st = report(ctx, ds);
    *out = dup_string(listing);
    return st;
  });
}

gw_metastore* gw_metastore_create(void) { return new (std::nothrow) gw_metastore(); }
void gw_metastore_destroy(gw_metastore* s) { delete s; }
size_t gw_metastore_entry_count(const gw_metastore* s) { return s ? s->store.entry_count() : 0; }

gw_status gw_metastore_apply(gw_context* ctx, gw_metastore* s, const gw_grammar* g,
                             const char* aspect_text, size_t len, const char* aspect_name) {
  if (!s || !g || (!aspect_text && len)) return GW_ERROR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    auto aspect = gw::parse_metadata_aspect(view(aspect_text, len), name_or(aspect_name, "<aspect>"));
    s->store = gw::apply_metadata_aspect(g->g, s->store, aspect);
    return GW_OK;
  });
}

gw_status gw_metastore_migrate(gw_context* ctx, gw_metastore* s, const gw_trace* t) {
  if (!s || !t) return GW_ERROR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    auto result = gw::migrate(s->store, t->trace);
    s->store = std::move(result.store);
    return report(ctx, result.report.findings);
  });
}

gw_status gw_metastore_dump_json(const gw_grammar* g, const gw_metastore* s, char** out) {
  if (!g || !s || !out) return GW_ERROR_INVALID_ARGUMENT;
  return guarded(nullptr, [&] {
    *out = dup_string(gw::dump_metadata_json(g->g, s->store));
    return GW_OK;
  });
}

gw_status gw_check_integrity(gw_context* ctx, const gw_grammar* g, const gw_metastore* s) {
  if (!g) return GW_ERROR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    gw::MetadataStore empty;
    return report(ctx, gw::check_integrity(g->g, s ? s->store : empty).findings);
  });
}

gw_status gw_parse(gw_context* ctx, const gw_grammar* g, const char* start, const char* input,
                   size_t len, const char* input_name, const gw_metastore* s, unsigned flags,
                   char** out) {
  constexpr unsigned known = GW_PARSE_AST | GW_PARSE_SEXPR | GW_PARSE_STRICT_AMBIGUITY;
  if (!g || !start || !out || (!input && len) || (flags & ~known)) return GW_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(ctx, [&] {
    gw::MetadataStore empty;
    const gw::MetadataStore& store = s ? s->store : empty;
    if (flags & GW_PARSE_AST) {
      auto rep = gw::check_integrity(g->g, store);
      if (report(ctx, rep.findings) != GW_OK) return GW_ERROR_DIAGNOSTICS;
    }
    auto tokens = gw::tokenize(g->g, view(input, len), name_or(input_name, "<input>"));
    gw::ParseOptions opts;
    opts.strict_ambiguity = (flags & GW_PARSE_STRICT_AMBIGUITY) != 0;
    auto outcome = gw::parse_input(g->g, start, tokens, opts);
    add(ctx, outcome.diagnostics);
    bool sexpr = (flags & GW_PARSE_SEXPR) != 0;
    if (flags & GW_PARSE_AST) {
      auto ast = gw::build_ast(g->g, outcome.tree, store);
      *out = dup_string(sexpr ? gw::ast_to_sexpr(ast) : gw::ast_to_json(ast));
    } else {
      *out = dup_string(sexpr ? gw::tree_to_sexpr(outcome.tree) : gw::tree_to_json(outcome.tree));
    }
    return GW_OK;
  });
}

}  // extern "C"
