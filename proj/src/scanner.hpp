#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "diagnostic.hpp"

namespace gw {

/// Character cursor shared by the grammar and aspect readers. Tracks 1-based
/// line/column, optionally offset so that fragments embedded in another file
/// report positions in that file.
class Scanner {
 public:
  struct Mark {
    std::size_t pos;
    int line;
    int col;
  };

  Scanner(std::string_view text, std::string file, int first_line = 1, int first_col = 1)
      : text_(text), file_(std::move(file)), line_(first_line), col_(first_col) {}

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool looking_at(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  char advance();
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) advance();
  }

  /// Skips whitespace and `//` line comments.
  void skip_trivia();

  Mark mark() const { return Mark{pos_, line_, col_}; }
  void reset(const Mark& m) {
    pos_ = m.pos;
    line_ = m.line;
    col_ = m.col;
  }

  SourceSpan span_from(const Mark& start) const;
  SourceSpan here() const;
  // Span covering only the character at the cursor, or the last character
  // when at end of input (so it still points inside the text).
  SourceSpan point() const;

  std::string_view slice(const Mark& from) const { return text_.substr(from.pos, pos_ - from.pos); }
  std::string_view text() const { return text_; }
  const std::string& file() const { return file_; }
  std::size_t pos() const { return pos_; }

  // identifier: [A-Za-z_][A-Za-z0-9_]*
  bool at_ident_start() const;
  std::string read_ident();

  /// Reads a quoted literal with the cursor on the opening quote. Supports
  /// \\ \' \" \n \t \r escapes. Throws E_SYNTAX on unterminated input.
  std::string read_quoted(char quote);

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail(const std::string& code, const std::string& message,
                         const SourceSpan& span) const;

 private:
  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_;
  int col_;
  int last_line_ = 0;
  int last_col_ = 0;
};

}  // namespace gw
