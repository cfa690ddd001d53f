#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grammarweave/grammarweave.h"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot read '" + path + "'"};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string read_stdin() {
  return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  gw_string_free(s);
  return out;
}

// Owns a context and forwards its diagnostics to stderr as they arrive.
class Session {
 public:
  Session(bool json, bool strict) : ctx_(gw_context_create()), json_(json), strict_(strict) {}
  ~Session() { gw_context_destroy(ctx_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  gw_context* ctx() { return ctx_; }

  // Prints pending diagnostics; returns false on errors or internal failure.
  bool flush(gw_status st) {
    for (size_t i = 0; i < gw_diag_count(ctx_); ++i) {
      gw_diagnostic d;
      gw_diag_get(ctx_, i, &d);
      if (d.severity == GW_SEVERITY_ERROR) ++errors_;
      if (d.severity == GW_SEVERITY_WARNING) ++warnings_;
      char* line = nullptr;
      if (gw_diag_format(ctx_, i, json_ ? 1 : 0, &line) == GW_OK) std::cerr << take(line) << "\n";
    }
    gw_diag_clear(ctx_);
    if (st == GW_ERROR_INTERNAL || st == GW_ERROR_INVALID_ARGUMENT) {
      std::cerr << "error: " << gw_status_string(st);
      if (*gw_last_error(ctx_)) std::cerr << ": " << gw_last_error(ctx_);
      std::cerr << "\n";
      ++errors_;
    }
    return st == GW_OK;
  }

  int status() const {
    if (errors_ > 0) return kFailed;
    if (strict_ && warnings_ > 0) return kFailed;
    return kOk;
  }

 private:
  gw_context* ctx_;
  bool json_;
  bool strict_;
  int errors_ = 0;
  int warnings_ = 0;
};

struct Grammar {
  gw_grammar* g = nullptr;
  Grammar() = default;
  explicit Grammar(gw_grammar* p) : g(p) {}
  Grammar(Grammar&& o) noexcept : g(o.g) { o.g = nullptr; }
  Grammar& operator=(Grammar&& o) noexcept {
    std::swap(g, o.g);
    return *this;
  }
  ~Grammar() { gw_grammar_destroy(g); }
};

struct Store {
  gw_metastore* s = gw_metastore_create();
  Store() = default;
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;
  ~Store() { gw_metastore_destroy(s); }
};

std::optional<Grammar> load_grammar(Session& session, const std::string& path) {
  std::string text = read_file(path);
  gw_grammar* g = nullptr;
  gw_status st = gw_grammar_parse(session.ctx(), text.data(), text.size(), path.c_str(), &g);
  if (!session.flush(st)) return std::nullopt;
  return Grammar(g);
}

bool apply_meta(Session& session, Store& store, const Grammar& g, const std::string& path) {
  std::string text = read_file(path);
  return session.flush(
      gw_metastore_apply(session.ctx(), store.s, g.g, text.data(), text.size(), path.c_str()));
}

// -a/-m occurrences in command-line order.
std::vector<std::pair<char, std::string>> steps_in_order(CLI::App* sub, CLI::Option* aspects,
                                                         CLI::Option* metas) {
  std::vector<std::pair<char, std::string>> steps;
  std::size_t ai = 0;
  std::size_t mi = 0;
  const auto& a = aspects ? aspects->results() : std::vector<std::string>{};
  const auto& m = metas->results();
  for (CLI::Option* opt : sub->parse_order()) {
    if (aspects && opt == aspects && ai < a.size()) steps.emplace_back('a', a[ai++]);
    if (opt == metas && mi < m.size()) steps.emplace_back('m', m[mi++]);
  }
  return steps;
}

struct Common {
  bool diag_json = false;
  bool strict = false;
};

int run_weave(CLI::App* sub, const Common& common, const std::string& base, CLI::Option* aspects,
              CLI::Option* metas, const std::string& out_path, const std::string& trace_path,
              bool no_migrate, const std::string& meta_path) {
  Session session(common.diag_json, common.strict);
  auto g = load_grammar(session, base);
  if (!g) return session.status();
  Store store;
  std::string trace_text;
  for (const auto& [kind, path] : steps_in_order(sub, aspects, metas)) {
    if (kind == 'm') {
      if (!apply_meta(session, store, *g, path)) return session.status();
      continue;
    }
    std::string text = read_file(path);
    gw_grammar* next = nullptr;
    gw_trace* trace = nullptr;
    gw_status st = gw_weave_aspect(session.ctx(), g->g, text.data(), text.size(), path.c_str(),
                                   &next, &trace);
    if (!session.flush(st)) return session.status();
    *g = Grammar(next);
    char* jsonl = nullptr;
    gw_trace_to_jsonl(trace, &jsonl);
    trace_text += take(jsonl);
    bool migrated = no_migrate || session.flush(gw_metastore_migrate(session.ctx(), store.s, trace));
    gw_trace_destroy(trace);
    if (!migrated) return session.status();
  }
  session.flush(gw_check_integrity(session.ctx(), g->g, store.s));

  char* printed = nullptr;
  gw_grammar_print(g->g, &printed);
  if (!write_file(out_path, take(printed))) throw UsageError{"cannot write '" + out_path + "'"};
  if (!trace_path.empty() && !write_file(trace_path, trace_text))
    throw UsageError{"cannot write '" + trace_path + "'"};
  if (!meta_path.empty()) {
    char* dump = nullptr;
    gw_metastore_dump_json(g->g, store.s, &dump);
    if (!write_file(meta_path, take(dump))) throw UsageError{"cannot write '" + meta_path + "'"};
  }
  return session.status();
}

int run_check(const Common& common, const std::string& path, CLI::App* sub, CLI::Option* metas,
              const std::string& meta_path) {
  Session session(common.diag_json, common.strict);
  auto g = load_grammar(session, path);
  if (!g) return session.status();
  Store store;
  for (const auto& step : steps_in_order(sub, nullptr, metas))
    if (!apply_meta(session, store, *g, step.second)) return session.status();
  session.flush(gw_check_integrity(session.ctx(), g->g, store.s));
  if (!meta_path.empty()) {
    char* dump = nullptr;
    gw_metastore_dump_json(g->g, store.s, &dump);
    if (!write_file(meta_path, take(dump))) throw UsageError{"cannot write '" + meta_path + "'"};
  }
  return session.status();
}

int run_parse(const Common& common, const std::string& path, const std::string& start,
              const std::string& input_path, bool ast, const std::string& format, CLI::App* sub,
              CLI::Option* metas, bool strict_ambiguity) {
  Session session(common.diag_json, common.strict);
  std::string input = input_path == "-" ? read_stdin() : read_file(input_path);
  auto g = load_grammar(session, path);
  if (!g) return session.status();
  Store store;
  for (const auto& step : steps_in_order(sub, nullptr, metas))
    if (!apply_meta(session, store, *g, step.second)) return session.status();
  unsigned flags = 0;
  if (ast) flags |= GW_PARSE_AST;
  if (format == "sexpr") flags |= GW_PARSE_SEXPR;
  if (strict_ambiguity) flags |= GW_PARSE_STRICT_AMBIGUITY;
  std::string name = input_path == "-" ? "<stdin>" : input_path;
  char* out = nullptr;
  gw_status st = gw_parse(session.ctx(), g->g, start.c_str(), input.data(), input.size(),
                          name.c_str(), store.s, flags, &out);
  if (session.flush(st)) std::cout << take(out);
  return session.status();
}

int run_print(const Common& common, const std::string& path) {
  Session session(common.diag_json, common.strict);
  auto g = load_grammar(session, path);
  if (!g) return session.status();
  char* out = nullptr;
  gw_grammar_print(g->g, &out);
  std::cout << take(out);
  return session.status();
}

int run_match(const Common& common, const std::string& path, const std::string& aspect_path) {
  Session session(common.diag_json, common.strict);
  auto g = load_grammar(session, path);
  if (!g) return session.status();
  std::string text = read_file(aspect_path);
  char* out = nullptr;
  gw_status st = gw_match(session.ctx(), g->g, text.data(), text.size(), aspect_path.c_str(), &out);
  std::cout << take(out);
  session.flush(st);
  return session.status();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weave grammar dialects from aspect files, then check and parse with them.",
               "gramweave"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gw_version()));

  Common common;
  app.add_flag("--diag-json", common.diag_json, "Print diagnostics as JSON lines");
  app.add_flag("--strict", common.strict, "Treat warnings as errors");
  app.fallthrough();

  std::string grammar_path;
  std::string out_path;
  std::string trace_path;
  std::string meta_path;
  bool no_migrate = false;

  auto* weave = app.add_subcommand("weave", "Apply aspects to a grammar");
  weave->add_option("BASE", grammar_path, "Base grammar (.gram)")->required();
  auto* weave_a = weave->add_option("-a,--aspect", "Syntactic aspect (.gaspect), repeatable")
                      ->expected(1)
                      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  auto* weave_m = weave->add_option("-m,--meta", "Metadata aspect (.maspect), repeatable")
                      ->expected(1)
                      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  weave->add_option("-o,--output", out_path, "Woven grammar output")->required();
  weave->add_option("--emit-trace", trace_path, "Write the change trace as JSON lines");
  weave->add_flag("--no-migrate", no_migrate, "Leave metadata of replaced nodes in place");
  weave->add_option("--dump-meta", meta_path, "Write the final metadata store as JSON");

  auto* check = app.add_subcommand("check", "Check well-formedness and metadata integrity");
  check->add_option("GRAMMAR", grammar_path, "Grammar (.gram)")->required();
  auto* check_m = check->add_option("-m,--meta", "Metadata aspect (.maspect), repeatable")
                      ->expected(1)
                      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  check->add_option("--dump-meta", meta_path, "Write the metadata store as JSON");

  std::string start;
  std::string input_path = "-";
  std::string format = "json";
  bool ast = false;
  bool strict_ambiguity = false;
  auto* parse = app.add_subcommand("parse", "Parse input with a grammar");
  parse->add_option("GRAMMAR", grammar_path, "Grammar (.gram)")->required();
  parse->add_option("INPUT", input_path, "Input file, or - for standard input");
  parse->add_option("--start", start, "Start rule")->required();
  parse->add_flag("--ast", ast, "Print the AST instead of the parse tree");
  parse->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "sexpr"}));
  auto* parse_m = parse->add_option("-m,--meta", "Metadata aspect (.maspect), repeatable")
                      ->expected(1)
                      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  parse->add_flag("--strict-ambiguity", strict_ambiguity, "Ambiguous input is an error");

  auto* print = app.add_subcommand("print", "Print a grammar in canonical form");
  print->add_option("GRAMMAR", grammar_path, "Grammar (.gram)")->required();

  std::string aspect_path;
  bool dry_run = false;
  auto* match = app.add_subcommand("match", "List the matches of an aspect's pointcuts");
  match->add_option("GRAMMAR", grammar_path, "Grammar (.gram)")->required();
  match->add_option("-a,--aspect", aspect_path, "Syntactic aspect (.gaspect)")->required();
  match->add_flag("--dry-run", dry_run, "Only list matches (the default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*weave)
      return run_weave(weave, common, grammar_path, weave_a, weave_m, out_path, trace_path,
                       no_migrate, meta_path);
    if (*check) return run_check(common, grammar_path, check, check_m, meta_path);
    if (*parse)
      return run_parse(common, grammar_path, start, input_path, ast, format, parse, parse_m,
                       strict_ambiguity);
    if (*print) return run_print(common, grammar_path);
    if (*match) return run_match(common, grammar_path, aspect_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.message << "\n";
    return kUsage;
  }
  return kUsage;
}
