#include "aspect.hpp"

#include <charconv>
#include <set>

#include "scanner.hpp"

namespace gw {

std::string_view verb_name(Verb v) {
  switch (v) {
    case Verb::Before: return "before";
    case Verb::After: return "after";
    case Verb::Instead: return "instead";
    case Verb::Remove: return "remove";
  }
  return "instead";
}

std::string_view meta_type_name(const MetaValue& v) {
  switch (v.index()) {
    case 0: return "string";
    case 1: return "integer";
    case 2: return "boolean";
    default: return "identifier";
  }
}

namespace {

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::string format_meta_value(const MetaValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, std::string>)
          return quote_string(x);
        else if constexpr (std::is_same_v<X, std::int64_t>)
          return std::to_string(x);
        else if constexpr (std::is_same_v<X, bool>)
          return x ? "true" : "false";
        else
          return x.name;
      },
      v);
}

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

class AspectParser {
 public:
  explicit AspectParser(Scanner& sc) : sc_(sc) {}

  bool at_add_directive() {
    if (!sc_.looking_at("add")) return false;
    auto m = sc_.mark();
    bool yes = sc_.read_ident() == "add";
    if (yes) {
      sc_.skip_trivia();
      yes = sc_.looking_at("<<");
    }
    sc_.reset(m);
    return yes;
  }

  AddDirective add_directive() {
    auto start = sc_.mark();
    sc_.advance(3);
    sc_.skip_trivia();
    AddDirective d;
    d.fragment = fragment();
    sc_.skip_trivia();
    if (sc_.peek() == ';') sc_.advance();
    d.span = sc_.span_from(start);
    return d;
  }

  Pointcut pointcut() {
    auto start = sc_.mark();
    Pointcut pc;
    binders_.clear();
    if (sc_.peek() == '?') {
      pc.optional = true;
      sc_.advance();
      sc_.skip_trivia();
    }
    if (sc_.peek() == '*') {
      sc_.advance();
      pc.rule_selector = "*";
    } else if (sc_.at_ident_start()) {
      auto m = sc_.mark();
      pc.rule_selector = sc_.read_ident();
      if (!is_rule_name(pc.rule_selector))
        sc_.fail("E_SYNTAX", "rule selector must be a rule name or '*'", sc_.span_from(m));
    } else {
      sc_.fail("expected a rule selector (rule name or '*')");
    }
    sc_.skip_trivia();
    if (sc_.peek() == '$') pc.binder = binder();
    sc_.skip_trivia();
    if (!sc_.looking_at("|:")) sc_.fail("expected '|:' to start the production pattern");
    sc_.advance(2);
    pc.pattern.elements = elements(false);
    pc.span = sc_.span_from(start);
    return pc;
  }

  std::vector<Action> actions() {
    std::vector<Action> out;
    for (;;) {
      sc_.skip_trivia();
      if (sc_.peek() == ';' && !sc_.at_end()) {
        if (out.empty()) sc_.fail("block needs at least one action");
        sc_.advance();
        return out;
      }
      if (sc_.peek() != '@' || sc_.at_end()) {
        if (sc_.at_end()) sc_.fail("expected ';' at end of input");
        sc_.fail("expected '@target.verb' or ';'");
      }
      out.push_back(action());
    }
  }

  std::vector<MetaAssignment> assignments() {
    std::vector<MetaAssignment> out;
    for (;;) {
      sc_.skip_trivia();
      if (sc_.peek() == ';' && !sc_.at_end()) {
        if (out.empty()) sc_.fail("block needs at least one assignment");
        sc_.advance();
        return out;
      }
      if (sc_.peek() != '@' || sc_.at_end()) {
        if (sc_.at_end()) sc_.fail("expected ';' at end of input");
        sc_.fail("expected '@target.meta[\"key\"] = value' or ';'");
      }
      out.push_back(assignment());
    }
  }

 private:
  std::string binder() {
    auto m = sc_.mark();
    sc_.advance();  // $
    if (!sc_.at_ident_start()) sc_.fail("expected binder name after '$'");
    std::string name = sc_.read_ident();
    if (name == "rule" || name == "grammar")
      sc_.fail("E_DUP_BINDER", "'$" + name + "' is an implicit binding", sc_.span_from(m));
    if (!binders_.insert(name).second)
      sc_.fail("E_DUP_BINDER", "binder '$" + name + "' declared twice in one block",
               sc_.span_from(m));
    sc_.skip_trivia();
    if (sc_.peek() != '=') sc_.fail("expected '=' after binder '$" + name + "'");
    sc_.advance();
    return name;
  }

  std::vector<TermPattern> elements(bool in_group) {
    std::vector<TermPattern> out;
    for (;;) {
      sc_.skip_trivia();
      char c = sc_.peek();
      if (sc_.at_end() || c == '@' || c == ';' || (in_group && c == ')')) return out;
      out.push_back(element());
    }
  }

  TermPattern element() {
    auto start = sc_.mark();
    TermPattern tp;
    if (sc_.peek() == '$') {
      tp.binder = binder();
      sc_.skip_trivia();
    }
    char c = sc_.peek();
    if (sc_.looking_at("..")) {
      if (!tp.binder.empty()) sc_.fail("E_SYNTAX", "a gap '..' cannot be bound", sc_.span_from(start));
      sc_.advance(2);
      tp.kind = TermPattern::Kind::Gap;
    } else if (c == '\'') {
      tp.kind = TermPattern::Kind::Literal;
      tp.text = sc_.read_quoted('\'');
      if (tp.text.empty()) sc_.fail("E_SYNTAX", "empty literal pattern", sc_.span_from(start));
    } else if (c == '(') {
      sc_.advance();
      tp.kind = TermPattern::Kind::Group;
      tp.body = elements(true);
      if (sc_.peek() != ')' || sc_.at_end()) sc_.fail("expected ')' to close group pattern");
      if (tp.body.empty()) sc_.fail("E_SYNTAX", "empty group pattern", sc_.span_from(start));
      sc_.advance();
      switch (sc_.peek()) {
        case '*': tp.rep = Repetition::Star; sc_.advance(); break;
        case '+': tp.rep = Repetition::Plus; sc_.advance(); break;
        case '?': tp.rep = Repetition::Opt; sc_.advance(); break;
        default: break;
      }
    } else if (sc_.at_ident_start()) {
      std::string name = sc_.read_ident();
      if (name == "_") {
        tp.kind = TermPattern::Kind::AnyOne;
      } else if (is_token_name(name)) {
        tp.kind = TermPattern::Kind::Token;
        tp.text = std::move(name);
      } else if (is_rule_name(name)) {
        tp.kind = TermPattern::Kind::Rule;
        tp.text = std::move(name);
      } else {
        sc_.fail("E_SYNTAX", "'" + name + "' is neither a TOKEN nor a rule name",
                 sc_.span_from(start));
      }
    } else {
      sc_.fail(std::string("unexpected '") + c + "' in production pattern");
    }
    tp.span = sc_.span_from(start);
    return tp;
  }

  Reference reference() {
    auto start = sc_.mark();
    sc_.advance();  // @
    Reference ref;
    if (sc_.peek() == '\'') {
      ref.literal = true;
      ref.name = sc_.read_quoted('\'');
      if (ref.name.empty()) sc_.fail("E_SYNTAX", "empty literal reference", sc_.span_from(start));
    } else if (sc_.at_ident_start()) {
      ref.name = sc_.read_ident();
    } else {
      sc_.fail("expected a name or 'literal' after '@'");
    }
    ref.span = sc_.span_from(start);
    if (sc_.peek() != '.') sc_.fail("expected '.' after reference");
    sc_.advance();
    return ref;
  }

  Action action() {
    auto start = sc_.mark();
    Action a;
    a.target = reference();
    auto verb_mark = sc_.mark();
    std::string verb = sc_.read_ident();
    if (verb == "before") a.verb = Verb::Before;
    else if (verb == "after") a.verb = Verb::After;
    else if (verb == "instead") a.verb = Verb::Instead;
    else if (verb == "remove") a.verb = Verb::Remove;
    else
      sc_.fail("E_SYNTAX", "unknown verb '" + verb + "' (expected before, after, instead, remove)",
               sc_.span_from(verb_mark));
    sc_.skip_trivia();
    if (sc_.peek() == '=') {
      sc_.advance();
      sc_.skip_trivia();
      if (!sc_.looking_at("<<")) sc_.fail("expected '<<' fragment after '='");
      a.fragment = fragment();
    }
    a.span = sc_.span_from(start);
    if (a.verb == Verb::Remove && a.fragment)
      sc_.fail("E_VERB_ARITY", "'remove' takes no fragment", a.span);
    if (a.verb != Verb::Remove && !a.fragment)
      sc_.fail("E_VERB_ARITY", "'" + verb + "' requires a << fragment >>", a.span);
    return a;
  }

  Fragment fragment() {
    auto open = sc_.mark();
    sc_.advance(2);
    Fragment f;
    f.span = sc_.here();
    auto body = sc_.mark();
    for (;;) {
      if (sc_.at_end()) {
        sc_.reset(open);
        sc_.fail("E_SYNTAX", "unterminated fragment, expected '>>'", sc_.point());
      }
      if (sc_.looking_at(">>")) break;
      if (sc_.peek() == '\'') {
        // Quoted literal inside the fragment may contain '>>'.
        auto q = sc_.mark();
        sc_.advance();
        while (!sc_.at_end() && sc_.peek() != '\'' && sc_.peek() != '\n') {
          if (sc_.peek() == '\\') sc_.advance();
          sc_.advance();
        }
        if (sc_.peek() == '\'') {
          sc_.advance();
        } else {
          sc_.reset(q);
          sc_.advance();
        }
        continue;
      }
      sc_.advance();
    }
    f.text = std::string(sc_.slice(body));
    f.span = sc_.span_from(body);
    if (f.text.empty()) f.span = sc_.span_from(open);
    sc_.advance(2);
    Scanner probe(f.text, "");
    probe.skip_trivia();
    if (probe.at_end()) sc_.fail("E_FRAGMENT_EMPTY", "fragment is empty", sc_.span_from(open));
    return f;
  }

  MetaAssignment assignment() {
    auto start = sc_.mark();
    MetaAssignment as;
    as.target = reference();
    auto m = sc_.mark();
    if (sc_.read_ident() != "meta") sc_.fail("E_SYNTAX", "expected 'meta' after '.'", sc_.span_from(m));
    sc_.skip_trivia();
    if (sc_.peek() != '[') sc_.fail("expected '[' after 'meta'");
    sc_.advance();
    sc_.skip_trivia();
    if (sc_.peek() == ']') sc_.fail("metadata key must not be empty");
    if (sc_.peek() != '"') sc_.fail("expected a quoted metadata key");
    auto key_mark = sc_.mark();
    as.key = sc_.read_quoted('"');
    if (as.key.empty()) sc_.fail("E_SYNTAX", "metadata key must not be empty", sc_.span_from(key_mark));
    sc_.skip_trivia();
    if (sc_.peek() != ']') sc_.fail("expected ']' after metadata key");
    sc_.advance();
    sc_.skip_trivia();
    if (sc_.peek() != '=') sc_.fail("expected '=' in metadata assignment");
    sc_.advance();
    sc_.skip_trivia();
    as.value = value();
    as.span = sc_.span_from(start);
    return as;
  }

  MetaValue value() {
    auto start = sc_.mark();
    if (sc_.at_end()) sc_.fail("E_BAD_VALUE", "missing value", sc_.point());
    if (sc_.peek() == '"') return sc_.read_quoted('"');
    // A bare word runs to the next delimiter; classify it afterwards.
    while (!sc_.at_end()) {
      char c = sc_.peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';' || c == '@') break;
      if (c == '/' && sc_.peek(1) == '/') break;
      sc_.advance();
    }
    std::string_view word = sc_.slice(start);
    SourceSpan span = sc_.span_from(start);
    if (word.empty()) sc_.fail("E_BAD_VALUE", "missing value", sc_.point());
    if (word == "true") return true;
    if (word == "false") return false;
    std::size_t digits_from = word[0] == '-' ? 1 : 0;
    if (digits_from < word.size() && word[digits_from] >= '0' && word[digits_from] <= '9') {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
      if (ec != std::errc{} || ptr != word.data() + word.size())
        sc_.fail("E_BAD_VALUE", "invalid integer '" + std::string(word) + "'", span);
      return v;
    }
    bool ident = (word[0] >= 'a' && word[0] <= 'z') || (word[0] >= 'A' && word[0] <= 'Z') ||
                 word[0] == '_';
    for (char c : word) ident = ident && is_word_char(c);
    if (!ident)
      sc_.fail("E_BAD_VALUE",
               "'" + std::string(word) + "' is not a string, integer, boolean or identifier", span);
    return Identifier{std::string(word)};
  }

  Scanner& sc_;
  std::set<std::string> binders_;
};

}  // namespace

SyntacticAspect parse_syntactic_aspect(std::string_view text, const std::string& name) {
  SyntacticAspect out;
  out.name = name;
  Scanner sc(text, name);
  AspectParser p(sc);
  for (;;) {
    sc.skip_trivia();
    if (sc.at_end()) break;
    if (p.at_add_directive()) {
      out.directives.emplace_back(p.add_directive());
      continue;
    }
    MatchBlock mb;
    mb.pointcut = p.pointcut();
    mb.actions = p.actions();
    out.directives.emplace_back(std::move(mb));
  }
  return out;
}

MetadataAspect parse_metadata_aspect(std::string_view text, const std::string& name) {
  MetadataAspect out;
  out.name = name;
  Scanner sc(text, name);
  AspectParser p(sc);
  for (;;) {
    sc.skip_trivia();
    if (sc.at_end()) break;
    MetaBlock mb;
    mb.pointcut = p.pointcut();
    mb.assignments = p.assignments();
    out.blocks.push_back(std::move(mb));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Debug printing

namespace {

void print_elements(const std::vector<TermPattern>& elems, std::string& out) {
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const TermPattern& tp = elems[i];
    if (i) out += ' ';
    if (!tp.binder.empty()) out += '$' + tp.binder + '=';
    switch (tp.kind) {
      case TermPattern::Kind::Token:
      case TermPattern::Kind::Rule: out += tp.text; break;
      case TermPattern::Kind::Literal: out += quote_literal(tp.text); break;
      case TermPattern::Kind::AnyOne: out += '_'; break;
      case TermPattern::Kind::Gap: out += ".."; break;
      case TermPattern::Kind::Group:
        out += '(';
        print_elements(tp.body, out);
        out += ')';
        out += repetition_suffix(tp.rep);
        break;
    }
  }
}

std::string print_reference(const Reference& r) {
  return "@" + (r.literal ? quote_literal(r.name) : r.name);
}

}  // namespace

std::string to_source(const Pointcut& p) {
  std::string out;
  if (p.optional) out += "? ";
  out += p.rule_selector;
  out += ' ';
  if (!p.binder.empty()) out += '$' + p.binder + '=';
  out += "|:";
  if (!p.pattern.elements.empty()) {
    out += ' ';
    print_elements(p.pattern.elements, out);
  }
  return out;
}

std::string to_source(const SyntacticAspect& a) {
  std::string out;
  for (const Directive& d : a.directives) {
    if (const auto* add = std::get_if<AddDirective>(&d)) {
      out += "add <<" + add->fragment.text + ">> ;\n";
      continue;
    }
    const auto& mb = std::get<MatchBlock>(d);
    out += to_source(mb.pointcut) + '\n';
    for (const Action& act : mb.actions) {
      out += "    " + print_reference(act.target) + '.' + std::string(verb_name(act.verb));
      if (act.fragment) out += " = <<" + act.fragment->text + ">>";
      out += '\n';
    }
    out += "    ;\n";
  }
  return out;
}

std::string to_source(const MetadataAspect& a) {
  std::string out;
  for (const MetaBlock& mb : a.blocks) {
    out += to_source(mb.pointcut) + '\n';
    for (const MetaAssignment& as : mb.assignments)
      out += "    " + print_reference(as.target) + ".meta[" + quote_string(as.key) +
             "] = " + format_meta_value(as.value) + '\n';
    out += "    ;\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equality

namespace {

bool eq(const TermPattern& a, const TermPattern& b);

bool eq(const std::vector<TermPattern>& a, const std::vector<TermPattern>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eq(a[i], b[i])) return false;
  return true;
}

bool eq(const TermPattern& a, const TermPattern& b) {
  return a.kind == b.kind && a.text == b.text && a.rep == b.rep && a.binder == b.binder &&
         eq(a.body, b.body);
}

bool eq(const Pointcut& a, const Pointcut& b) {
  return a.rule_selector == b.rule_selector && a.optional == b.optional &&
         a.binder == b.binder && eq(a.pattern.elements, b.pattern.elements);
}

bool eq(const Reference& a, const Reference& b) {
  return a.literal == b.literal && a.name == b.name;
}

}  // namespace

bool structurally_equal(const SyntacticAspect& a, const SyntacticAspect& b) {
  if (a.directives.size() != b.directives.size()) return false;
  for (std::size_t i = 0; i < a.directives.size(); ++i) {
    const Directive& x = a.directives[i];
    const Directive& y = b.directives[i];
    if (x.index() != y.index()) return false;
    if (const auto* ax = std::get_if<AddDirective>(&x)) {
      if (ax->fragment.text != std::get<AddDirective>(y).fragment.text) return false;
      continue;
    }
    const auto& mx = std::get<MatchBlock>(x);
    const auto& my = std::get<MatchBlock>(y);
    if (!eq(mx.pointcut, my.pointcut) || mx.actions.size() != my.actions.size()) return false;
    for (std::size_t k = 0; k < mx.actions.size(); ++k) {
      const Action& p = mx.actions[k];
      const Action& q = my.actions[k];
      if (!eq(p.target, q.target) || p.verb != q.verb ||
          p.fragment.has_value() != q.fragment.has_value())
        return false;
      if (p.fragment && p.fragment->text != q.fragment->text) return false;
    }
  }
  return true;
}

bool structurally_equal(const MetadataAspect& a, const MetadataAspect& b) {
  if (a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const MetaBlock& x = a.blocks[i];
    const MetaBlock& y = b.blocks[i];
    if (!eq(x.pointcut, y.pointcut) || x.assignments.size() != y.assignments.size()) return false;
    for (std::size_t k = 0; k < x.assignments.size(); ++k) {
      const MetaAssignment& p = x.assignments[k];
      const MetaAssignment& q = y.assignments[k];
      if (!eq(p.target, q.target) || p.key != q.key || !(p.value == q.value)) return false;
    }
  }
  return true;
}

}  // namespace gw
