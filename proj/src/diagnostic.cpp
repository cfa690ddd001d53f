#include "diagnostic.hpp"

#include <algorithm>
#include "json.hpp"

namespace gw {

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Notice: return "notice";
  }
  return "error";
}

bool has_errors(const Diagnostics& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

Diagnostic make(Severity sev, std::string code, std::string message, SourceSpan span,
                std::string path) {
  return Diagnostic{sev, std::move(code), std::move(message), std::move(span), std::move(path)};
}

std::string first_message(const Diagnostics& diags) {
  if (diags.empty()) return "diagnostics reported";
  return diags.front().code + ": " + diags.front().message;
}

}  // namespace

Diagnostic make_error(std::string code, std::string message, SourceSpan span, std::string path) {
  return make(Severity::Error, std::move(code), std::move(message), std::move(span),
              std::move(path));
}

Diagnostic make_warning(std::string code, std::string message, SourceSpan span,
                        std::string path) {
  return make(Severity::Warning, std::move(code), std::move(message), std::move(span),
              std::move(path));
}

Diagnostic make_notice(std::string code, std::string message, SourceSpan span,
                       std::string path) {
  return make(Severity::Notice, std::move(code), std::move(message), std::move(span),
              std::move(path));
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string out = severity_name(d.severity);
  out += ' ';
  out += d.code;
  out += ' ';
  out += d.span.file.empty() ? "<input>" : d.span.file;
  out += ':' + std::to_string(d.span.start_line) + ':' + std::to_string(d.span.start_col);
  out += ' ';
  out += d.message;
  if (!d.path.empty()) out += " [" + d.path + "]";
  return out;
}

std::string diagnostic_to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["severity"] = severity_name(d.severity);
  j["code"] = d.code;
  j["file"] = d.span.file;
  j["line"] = d.span.start_line;
  j["col"] = d.span.start_col;
  j["end_line"] = d.span.end_line;
  j["end_col"] = d.span.end_col;
  j["message"] = d.message;
  if (!d.path.empty()) j["path"] = d.path;
  return j.dump();
}

DiagnosticError::DiagnosticError(Diagnostics diags)
    : std::runtime_error(first_message(diags)), diags_(std::move(diags)) {}

DiagnosticError::DiagnosticError(Diagnostic diag) : DiagnosticError(Diagnostics{std::move(diag)}) {}

}  // namespace gw
