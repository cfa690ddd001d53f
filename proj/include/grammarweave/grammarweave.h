#ifndef GRAMMARWEAVE_H
#define GRAMMARWEAVE_H

#include <stddef.h>

#if defined(_WIN32)
#  define GW_API __declspec(dllexport)
#else
#  define GW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque handles. */
typedef struct gw_context gw_context;
typedef struct gw_grammar gw_grammar;
typedef struct gw_metastore gw_metastore;
typedef struct gw_trace gw_trace;

typedef enum gw_status {
  GW_OK = 0,
  GW_ERROR_DIAGNOSTICS = 1,      /* errors were added to the context */
  GW_ERROR_INVALID_ARGUMENT = 2, /* null handle or bad flag */
  GW_ERROR_INTERNAL = 3          /* unexpected failure; see gw_last_error */
} gw_status;

typedef enum gw_severity {
  GW_SEVERITY_ERROR = 0,
  GW_SEVERITY_WARNING = 1,
  GW_SEVERITY_NOTICE = 2
} gw_severity;

/* Strings point into the context and stay valid until gw_diag_clear or
   gw_context_destroy. Line/col are 1-based, 0 when unknown. */
typedef struct gw_diagnostic {
  gw_severity severity;
  const char* code;
  const char* message;
  const char* file;
  int line;
  int col;
  int end_line;
  int end_col;
  const char* path; /* object path, "" if none */
} gw_diagnostic;

enum {
  GW_PARSE_AST = 1u << 0,               /* emit the AST instead of the parse tree */
  GW_PARSE_SEXPR = 1u << 1,             /* s-expression text instead of JSON */
  GW_PARSE_STRICT_AMBIGUITY = 1u << 2   /* ambiguity is an error */
};

GW_API const char* gw_version(void);
GW_API const char* gw_status_string(gw_status s);

/* Every string returned through a char** out-parameter is heap-allocated
   and must be released with gw_string_free. */
GW_API void gw_string_free(char* s);

/* Contexts collect diagnostics; they are appended by each call. */
GW_API gw_context* gw_context_create(void);
GW_API void gw_context_destroy(gw_context* ctx);
GW_API size_t gw_diag_count(const gw_context* ctx);
GW_API gw_status gw_diag_get(const gw_context* ctx, size_t index, gw_diagnostic* out);
/* One line, no newline: "severity CODE file:line:col message", or a JSON
   object when as_json is non-zero. */
GW_API gw_status gw_diag_format(const gw_context* ctx, size_t index, int as_json, char** out);
GW_API size_t gw_diag_error_count(const gw_context* ctx);
GW_API void gw_diag_clear(gw_context* ctx);
GW_API const char* gw_last_error(const gw_context* ctx);

/* Grammars. A parsed grammar is checked for well-formedness. */
GW_API gw_status gw_grammar_parse(gw_context* ctx, const char* text, size_t len,
                                  const char* file_name, gw_grammar** out);
GW_API void gw_grammar_destroy(gw_grammar* g);
GW_API gw_status gw_grammar_print(const gw_grammar* g, char** out);
GW_API gw_status gw_grammar_check(gw_context* ctx, const gw_grammar* g);

/* Weaves one syntactic aspect into `in`, producing a new grammar and the
   change trace. `in` is not modified. */
GW_API gw_status gw_weave_aspect(gw_context* ctx, const gw_grammar* in, const char* aspect_text,
                                 size_t len, const char* aspect_name, gw_grammar** out,
                                 gw_trace** trace);
GW_API void gw_trace_destroy(gw_trace* t);
GW_API size_t gw_trace_size(const gw_trace* t);
GW_API gw_status gw_trace_to_jsonl(const gw_trace* t, char** out);

/* Lists the matches of every block of a syntactic aspect, one per line:
   "<block>\t<production path>\t<binder>=<path> ...". */
GW_API gw_status gw_match(gw_context* ctx, const gw_grammar* g, const char* aspect_text,
                          size_t len, const char* aspect_name, char** out);

/* Metadata. */
GW_API gw_metastore* gw_metastore_create(void);
GW_API void gw_metastore_destroy(gw_metastore* s);
GW_API size_t gw_metastore_entry_count(const gw_metastore* s);
/* Applies a metadata aspect against `g`. On error the store is unchanged. */
GW_API gw_status gw_metastore_apply(gw_context* ctx, gw_metastore* s, const gw_grammar* g,
                                    const char* aspect_text, size_t len,
                                    const char* aspect_name);
/* Rehomes entries of nodes replaced or removed by the traced weave. Emits
   W_META_DROPPED / N_META_SPLIT findings. */
GW_API gw_status gw_metastore_migrate(gw_context* ctx, gw_metastore* s, const gw_trace* t);
GW_API gw_status gw_metastore_dump_json(const gw_grammar* g, const gw_metastore* s, char** out);
/* Integrity findings (dangling references, reserved-key schema). s may be
   null for an empty store. */
GW_API gw_status gw_check_integrity(gw_context* ctx, const gw_grammar* g,
                                    const gw_metastore* s);

/* Lexes and parses `input` from rule `start`. `s` may be null. Writes the
   serialized tree (or AST with GW_PARSE_AST) to *out. */
GW_API gw_status gw_parse(gw_context* ctx, const gw_grammar* g, const char* start,
                          const char* input, size_t len, const char* input_name,
                          const gw_metastore* s, unsigned flags, char** out);

#ifdef __cplusplus
}
#endif

#endif
