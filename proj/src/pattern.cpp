#include "pattern.hpp"

#include <memory>
#include <utility>

namespace gw {

// Recursive-descent parse straight into a Thompson NFA.
class PatternCompiler {
 public:
  explicit PatternCompiler(std::string_view src, TokenPattern& out) : src_(src), out_(out) {}

  void run() {
    if (src_.empty()) throw PatternError("empty pattern", 0);
    Frag f = alternation();
    if (pos_ < src_.size()) {
      if (src_[pos_] == ')') throw PatternError("unbalanced ')'", pos_);
      throw PatternError("unexpected character", pos_);
    }
    int match = add(TokenPattern::State::Kind::Match);
    patch(f.outs, match);
    out_.start_ = f.start;
  }

 private:
  using Set = std::bitset<256>;
  using Kind = TokenPattern::State::Kind;

  // A dangling exit: state index plus which out slot (0 = out, 1 = out1).
  struct Hole {
    int state;
    int slot;
  };
  struct Frag {
    int start;
    std::vector<Hole> outs;
  };

  int add(Kind kind, Set set = {}) {
    TokenPattern::State s;
    s.kind = kind;
    s.set = set;
    out_.states_.push_back(s);
    return static_cast<int>(out_.states_.size()) - 1;
  }

  void patch(const std::vector<Hole>& holes, int target) {
    for (const Hole& h : holes) {
      auto& st = out_.states_[static_cast<std::size_t>(h.state)];
      (h.slot == 0 ? st.out : st.out1) = target;
    }
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  // Matches the empty string; both exits get patched to the same successor.
  Frag empty() {
    int s = add(Kind::Split);
    return Frag{s, {Hole{s, 0}, Hole{s, 1}}};
  }

  Frag alternation() {
    Frag left = sequence();
    while (!at_end() && peek() == '|') {
      ++pos_;
      Frag right = sequence();
      int s = add(Kind::Split);
      out_.states_[static_cast<std::size_t>(s)].out = left.start;
      out_.states_[static_cast<std::size_t>(s)].out1 = right.start;
      std::vector<Hole> outs = std::move(left.outs);
      outs.insert(outs.end(), right.outs.begin(), right.outs.end());
      left = Frag{s, std::move(outs)};
    }
    return left;
  }

  Frag sequence() {
    std::optional<Frag> acc;
    while (!at_end() && peek() != '|' && peek() != ')') {
      Frag f = repeated();
      if (!acc) {
        acc = std::move(f);
      } else {
        patch(acc->outs, f.start);
        acc->outs = std::move(f.outs);
      }
    }
    return acc ? std::move(*acc) : empty();
  }

  Frag repeated() {
    Frag f = atom();
    while (!at_end() && (peek() == '*' || peek() == '+' || peek() == '?')) {
      char q = peek();
      ++pos_;
      int s = add(Kind::Split);
      auto& st = out_.states_[static_cast<std::size_t>(s)];
      st.out = f.start;
      if (q == '*') {
        patch(f.outs, s);
        f = Frag{s, {Hole{s, 1}}};
      } else if (q == '+') {
        patch(f.outs, s);
        f = Frag{f.start, {Hole{s, 1}}};
      } else {
        std::vector<Hole> outs = std::move(f.outs);
        outs.push_back(Hole{s, 1});
        f = Frag{s, std::move(outs)};
      }
    }
    if (!at_end() && peek() == '{') throw PatternError("counted repetition is not supported", pos_);
    return f;
  }

  Frag single(Set set) {
    int s = add(Kind::Set, set);
    return Frag{s, {Hole{s, 0}}};
  }

  static Set range(unsigned char lo, unsigned char hi) {
    Set s;
    for (unsigned c = lo; c <= hi; ++c) s.set(c);
    return s;
  }
  static Set digits() { return range('0', '9'); }
  static Set words() { return range('a', 'z') | range('A', 'Z') | digits() | one('_'); }
  static Set spaces() {
    return one(' ') | one('\t') | one('\n') | one('\r') | one('\f') | one('\v');
  }
  static Set one(unsigned char c) {
    Set s;
    s.set(c);
    return s;
  }

  // Parses the character after a backslash.
  Set escape() {
    std::size_t at = pos_ - 1;
    if (at_end()) throw PatternError("trailing backslash", at);
    char c = src_[pos_++];
    switch (c) {
      case 'd': return digits();
      case 'D': return ~digits();
      case 'w': return words();
      case 'W': return ~words();
      case 's': return spaces();
      case 'S': return ~spaces();
      case 'n': return one('\n');
      case 'r': return one('\r');
      case 't': return one('\t');
      case 'f': return one('\f');
      case 'v': return one('\v');
      default: break;
    }
    if (c >= '0' && c <= '9') throw PatternError("backreferences are not supported", at);
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))
      throw PatternError(std::string("unknown escape \\") + c, at);
    return one(static_cast<unsigned char>(c));
  }

  Frag atom() {
    std::size_t at = pos_;
    char c = src_[pos_++];
    switch (c) {
      case '(': {
        Frag inner = alternation();
        if (at_end() || peek() != ')') throw PatternError("unbalanced '('", at);
        ++pos_;
        return inner;
      }
      case '*':
      case '+':
      case '?':
        throw PatternError("nothing to repeat", at);
      case '{':
        throw PatternError("counted repetition is not supported", at);
      case '.':
        return single(~one('\n'));
      case '[':
        return single(char_class(at));
      case '\\':
        return single(escape());
      default:
        return single(one(static_cast<unsigned char>(c)));
    }
  }

  Set char_class(std::size_t open) {
    bool negate = false;
    if (!at_end() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    Set s;
    bool first = true;
    for (;;) {
      if (at_end()) throw PatternError("unterminated character class", open);
      char c = src_[pos_];
      if (c == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      ++pos_;
      Set item;
      bool single_char = true;
      unsigned char lo = static_cast<unsigned char>(c);
      if (c == '\\') {
        item = escape();
        single_char = item.count() == 1;
        if (single_char)
          for (unsigned k = 0; k < 256; ++k)
            if (item.test(k)) lo = static_cast<unsigned char>(k);
      } else {
        item = one(lo);
      }
      if (single_char && pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] != ']') {
        ++pos_;
        char hc = src_[pos_++];
        unsigned char hi = static_cast<unsigned char>(hc);
        if (hc == '\\') {
          Set e = escape();
          if (e.count() != 1) throw PatternError("invalid range bound", pos_ - 1);
          for (unsigned k = 0; k < 256; ++k)
            if (e.test(k)) hi = static_cast<unsigned char>(k);
        }
        if (hi < lo) throw PatternError("reversed character range", pos_ - 1);
        item = range(lo, hi);
      }
      s |= item;
    }
    return negate ? ~s : s;
  }

  std::string_view src_;
  TokenPattern& out_;
  std::size_t pos_ = 0;
};

TokenPattern TokenPattern::compile(std::string_view source) {
  TokenPattern p;
  p.source_ = std::string(source);
  PatternCompiler(source, p).run();
  return p;
}

void TokenPattern::add_state(std::vector<int>& list, std::vector<unsigned>& mark, unsigned gen,
                             int s) const {
  if (s < 0) return;
  auto idx = static_cast<std::size_t>(s);
  if (mark[idx] == gen) return;
  mark[idx] = gen;
  const State& st = states_[idx];
  if (st.kind == State::Kind::Split) {
    add_state(list, mark, gen, st.out);
    add_state(list, mark, gen, st.out1);
    return;
  }
  list.push_back(s);
}

std::optional<std::size_t> TokenPattern::longest_match(std::string_view input,
                                                       std::size_t pos) const {
  std::vector<unsigned> mark(states_.size(), 0);
  unsigned gen = 1;
  std::vector<int> cur;
  std::vector<int> next;
  add_state(cur, mark, gen, start_);

  std::optional<std::size_t> best;
  std::size_t i = pos;
  for (;;) {
    for (int s : cur)
      if (states_[static_cast<std::size_t>(s)].kind == State::Kind::Match) best = i - pos;
    if (cur.empty() || i >= input.size()) break;
    auto c = static_cast<unsigned char>(input[i]);
    ++gen;
    next.clear();
    for (int s : cur) {
      const State& st = states_[static_cast<std::size_t>(s)];
      if (st.kind == State::Kind::Set && st.set.test(c)) add_state(next, mark, gen, st.out);
    }
    std::swap(cur, next);
    ++i;
  }
  return best;
}

bool TokenPattern::full_match(std::string_view input) const {
  auto m = longest_match(input, 0);
  return m && *m == input.size();
}

}  // namespace gw
