#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gw {

enum class Severity { Error, Warning, Notice };

const char* severity_name(Severity s);

// 1-based line/column; end is inclusive of the last character.
struct SourceSpan {
  std::string file;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool valid() const { return start_line > 0; }
};

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;
  std::string path;  // ObjectPath of the grammar object concerned, if any
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);

Diagnostic make_error(std::string code, std::string message, SourceSpan span = {},
                      std::string path = {});
Diagnostic make_warning(std::string code, std::string message, SourceSpan span = {},
                        std::string path = {});
Diagnostic make_notice(std::string code, std::string message, SourceSpan span = {},
                       std::string path = {});

// `SEVERITY CODE file:line:col message`
std::string format_diagnostic(const Diagnostic& d);
// One JSON object, no trailing newline.
std::string diagnostic_to_json(const Diagnostic& d);

/// Thrown by operations whose contract is "result or diagnostics".
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(Diagnostics diags);
  explicit DiagnosticError(Diagnostic diag);

  const Diagnostics& diagnostics() const noexcept { return diags_; }

 private:
  Diagnostics diags_;
};

}  // namespace gw
