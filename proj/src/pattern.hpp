#pragma once

#include <bitset>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gw {

class PatternError : public std::runtime_error {
 public:
  PatternError(const std::string& message, std::size_t offset)
      : std::runtime_error(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Compiled token pattern. Supported syntax: literal bytes, `.`, character
/// classes (`[a-z_]`, `[^...]`), `\d \w \s` and their negations, escaped
/// metacharacters, `\n \r \t`, alternation, grouping, and `* + ?`.
/// Backreferences and counted repetition are rejected.
class TokenPattern {
 public:
  static TokenPattern compile(std::string_view source);

  /// Length of the longest match of the pattern starting at `pos`, or
  /// nullopt when nothing (not even the empty string) matches there.
  std::optional<std::size_t> longest_match(std::string_view input, std::size_t pos) const;

  bool full_match(std::string_view input) const;

  const std::string& source() const { return source_; }

 private:
  struct State {
    enum class Kind { Set, Split, Match } kind = Kind::Match;
    std::bitset<256> set;
    int out = -1;
    int out1 = -1;
  };

  void add_state(std::vector<int>& list, std::vector<unsigned>& mark, unsigned gen,
                 int s) const;

  std::string source_;
  std::vector<State> states_;
  int start_ = -1;

  friend class PatternCompiler;
};

}  // namespace gw
