#include "scanner.hpp"

namespace gw {

char Scanner::advance() {
  if (at_end()) return '\0';
  char c = text_[pos_++];
  last_line_ = line_;
  last_col_ = col_;
  if (c == '\n') {
    ++line_;
    col_ = 1;
  } else {
    ++col_;
  }
  return c;
}

void Scanner::skip_trivia() {
  for (;;) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      advance();
    } else if (c == '/' && peek(1) == '/') {
      while (!at_end() && peek() != '\n') advance();
    } else {
      return;
    }
  }
}

SourceSpan Scanner::span_from(const Mark& start) const {
  SourceSpan s;
  s.file = file_;
  s.start_line = start.line;
  s.start_col = start.col;
  if (pos_ > start.pos) {
    s.end_line = last_line_;
    s.end_col = last_col_;
  } else {
    s.end_line = start.line;
    s.end_col = start.col;
  }
  return s;
}

SourceSpan Scanner::here() const {
  SourceSpan s;
  s.file = file_;
  s.start_line = s.end_line = line_;
  s.start_col = s.end_col = col_;
  return s;
}

SourceSpan Scanner::point() const {
  if (!at_end() || pos_ == 0) return here();
  SourceSpan s;
  s.file = file_;
  s.start_line = s.end_line = last_line_;
  s.start_col = s.end_col = last_col_;
  return s;
}

bool Scanner::at_ident_start() const {
  char c = peek();
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

std::string Scanner::read_ident() {
  std::string out;
  for (;;) {
    char c = peek();
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || (c >= '0' && c <= '9');
    if (!ok || at_end()) break;
    out += advance();
  }
  return out;
}

std::string Scanner::read_quoted(char quote) {
  Mark start = mark();
  advance();  // opening quote
  std::string out;
  for (;;) {
    if (at_end() || peek() == '\n') {
      reset(start);
      fail("E_SYNTAX", "unterminated quoted literal", point());
    }
    char c = advance();
    if (c == quote) break;
    if (c == '\\') {
      if (at_end()) {
        reset(start);
        fail("E_SYNTAX", "unterminated quoted literal", point());
      }
      char e = advance();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        default: fail("E_SYNTAX", std::string("unknown escape \\") + e, span_from(start));
      }
      continue;
    }
    out += c;
  }
  return out;
}

void Scanner::fail(const std::string& message) const { fail("E_SYNTAX", message, point()); }

void Scanner::fail(const std::string& code, const std::string& message,
                   const SourceSpan& span) const {
  throw DiagnosticError(make_error(code, message, span));
}

}  // namespace gw
