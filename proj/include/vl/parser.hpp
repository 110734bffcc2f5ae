#pragma once

#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vl/term.hpp"

namespace vl {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, DuplicateRecordLabel, DefaultLabelMissing, IntermediateForm, IntegerRange };

  ParseError(Kind kind, Span at, std::string message, std::vector<std::string> expected = {})
      : std::runtime_error(std::to_string(at.line) + ":" + std::to_string(at.col) + ": " + message),
        kind_(kind),
        at_(at),
        expected_(std::move(expected)) {}

  Kind kind() const { return kind_; }
  Span where() const { return at_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Kind kind_;
  Span at_;
  std::vector<std::string> expected_;
};

struct ParseOptions {
  // Accept `<l = t | l>` versioned computations (traces, tests).
  bool allow_intermediate = false;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts) : src_(src), opts_(opts) {}

  Term parse_program() {
    skip_ws();
    reject_definition();
    Term t = parse_term();
    skip_ws();
    if (!at_end()) {
      if (peek() == '@') intermediate_at();
      fail({"end of input", "'+'", "'.'", "argument"});
    }
    return t;
  }

 private:
  // -- lexical helpers ------------------------------------------------------

  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  Span here() const { return {line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
  static bool digit(char c) { return c >= '0' && c <= '9'; }
  static bool ident_start(char c) { return alpha(c) || c == '_'; }
  static bool ident_char(char c) { return alpha(c) || digit(c) || c == '_' || c == '\''; }

  std::string_view peek_word() const {
    std::size_t p = pos_;
    if (p >= src_.size() || !ident_start(src_[p])) return {};
    while (p < src_.size() && ident_char(src_[p])) ++p;
    return src_.substr(pos_, p - pos_);
  }

  bool at_keyword(std::string_view kw) const { return peek_word() == kw; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = at_end() ? "end of input" : "'" + std::string(1, peek()) + "'";
    std::string msg = "unexpected " + found + ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    throw ParseError(ParseError::Kind::Syntax, here(), msg, std::move(expected));
  }

  [[noreturn]] void intermediate_at() const {
    throw ParseError(ParseError::Kind::IntermediateForm, here(),
                     "the default-version overwriting operator '@' is internal to evaluation");
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail({"'" + std::string(1, c) + "'"});
    advance();
  }

  void expect_keyword(std::string_view kw) {
    skip_ws();
    if (!at_keyword(kw)) fail({"'" + std::string(kw) + "'"});
    for (std::size_t i = 0; i < kw.size(); ++i) advance();
  }

  std::string ident() {
    skip_ws();
    auto w = peek_word();
    if (w.empty() || w == "let" || w == "in") fail({"identifier"});
    for (std::size_t i = 0; i < w.size(); ++i) advance();
    return std::string(w);
  }

  Label label() {
    skip_ws();
    if (!alpha(peek())) fail({"version label"});
    std::size_t start = pos_;
    while (!at_end() && (alpha(peek()) || digit(peek()) || peek() == '_' || peek() == '.')) advance();
    return Label(std::string(src_.substr(start, pos_ - start)));
  }

  void reject_definition() {
    if (peek_word() != "def") return;
    throw ParseError(ParseError::Kind::Syntax, here(),
                     "top-level definitions are not supported; a program is a single term");
  }

  // -- grammar --------------------------------------------------------------

  bool starts_atom() {
    skip_ws();
    char c = peek();
    if (c == '(' || c == '[' || c == '{' || digit(c)) return true;
    if (c == '-' && digit(peek(1))) return true;
    if (c == '<') return true;  // rejected in parse_atom unless intermediate forms are on
    auto w = peek_word();
    return !w.empty() && w != "let" && w != "in";
  }

  bool starts_binder() {
    skip_ws();
    return peek() == '\\' || at_keyword("let");
  }

  Term parse_term() {
    skip_ws();
    Span s = here();
    if (peek() == '\\') {
      advance();
      std::string x = ident();
      expect('.');
      Term body = parse_term();
      return Term::abs(std::move(x), std::move(body), s);
    }
    if (at_keyword("let")) {
      expect_keyword("let");
      expect('[');
      std::string x = ident();
      expect(']');
      expect('=');
      Term bound = parse_term();
      expect_keyword("in");
      Term body = parse_term();
      return Term::let_box(std::move(x), std::move(bound), std::move(body), s);
    }
    return parse_sum();
  }

  Term parse_sum() {
    Term lhs = parse_app();
    for (;;) {
      skip_ws();
      if (peek() != '+') return lhs;
      Span s = here();
      advance();
      Term rhs = starts_binder() ? parse_term() : parse_app();
      lhs = Term::add(std::move(lhs), std::move(rhs), s);
    }
  }

  Term parse_app() {
    skip_ws();
    Span s = here();
    Term fn = parse_postfix();
    for (;;) {
      if (starts_binder()) return Term::app(std::move(fn), parse_term(), s);
      if (!starts_atom()) return fn;
      fn = Term::app(std::move(fn), parse_postfix(), s);
    }
  }

  Term parse_postfix() {
    Term t = parse_atom();
    for (;;) {
      skip_ws();
      if (peek() == '@') intermediate_at();
      if (peek() != '.') return t;
      Span s = here();
      advance();
      t = Term::extract(std::move(t), label(), s);
    }
  }

  Term parse_atom() {
    skip_ws();
    Span s = here();
    char c = peek();
    if (c == '(') {
      advance();
      Term t = parse_term();
      expect(')');
      return t;
    }
    if (c == '[') {
      advance();
      Term body = parse_term();
      expect(']');
      std::optional<Resource> annotation;
      if (peek() == '@') {
        advance();
        annotation = parse_resource();
      }
      return Term::promote(std::move(body), std::move(annotation), s);
    }
    if (c == '{') {
      advance();
      auto [entries, def] = parse_entries('}');
      return Term::record(std::move(entries), std::move(def), s);
    }
    if (c == '<') {
      if (!opts_.allow_intermediate)
        throw ParseError(ParseError::Kind::IntermediateForm, s,
                         "versioned computations <...> only arise during evaluation");
      advance();
      auto [entries, def] = parse_entries('>');
      return Term::comp(std::move(entries), std::move(def), s);
    }
    if (digit(c) || (c == '-' && digit(peek(1)))) return parse_int();
    auto w = peek_word();
    if (!w.empty() && w != "let" && w != "in") return Term::var(ident(), s);
    fail({"identifier", "integer", "'('", "'['", "'{'", "'\\'", "'let'"});
  }

  Term parse_int() {
    Span s = here();
    bool neg = false;
    if (peek() == '-') {
      neg = true;
      advance();
    }
    // accumulate as negative to admit INT64_MIN
    std::int64_t v = 0;
    while (digit(peek())) {
      int d = peek() - '0';
      if (v < (std::numeric_limits<std::int64_t>::min() + d) / 10)
        throw ParseError(ParseError::Kind::IntegerRange, s, "integer literal out of 64-bit range");
      v = v * 10 - d;
      advance();
    }
    if (!neg) {
      if (v == std::numeric_limits<std::int64_t>::min())
        throw ParseError(ParseError::Kind::IntegerRange, s, "integer literal out of 64-bit range");
      v = -v;
    }
    return Term::integer(v, s);
  }

  // `{l1, l2}` or `bot`
  Resource parse_resource() {
    if (at_keyword("bot")) {
      for (int i = 0; i < 3; ++i) advance();
      return Resource::bottom();
    }
    if (peek() != '{') fail({"'{'", "'bot'"});
    advance();
    std::vector<Label> ls;
    skip_ws();
    if (peek() != '}') {
      ls.push_back(label());
      for (skip_ws(); peek() == ','; skip_ws()) {
        advance();
        ls.push_back(label());
      }
    }
    expect('}');
    return Resource::of(std::move(ls));
  }

  std::pair<Entries, Label> parse_entries(char close) {
    Entries entries;
    std::set<Label> seen;
    for (;;) {
      skip_ws();
      Span at = here();
      Label l = label();
      if (!seen.insert(l).second)
        throw ParseError(ParseError::Kind::DuplicateRecordLabel, at,
                         "version label '" + l.name() + "' is defined twice");
      expect('=');
      Term t = parse_term();
      entries.emplace_back(std::move(l), std::move(t));
      skip_ws();
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == '|') break;
      fail({"','", "'|'"});
    }
    advance();
    skip_ws();
    Span at = here();
    Label def = label();
    if (!seen.count(def))
      throw ParseError(ParseError::Kind::DefaultLabelMissing, at,
                       "default label '" + def.name() + "' is not one of the record's labels");
    expect(close);
    return {std::move(entries), std::move(def)};
  }

  std::string_view src_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace detail

inline Term parse(std::string_view source, ParseOptions opts = {}) {
  return detail::Parser(source, opts).parse_program();
}

}  // namespace vl
