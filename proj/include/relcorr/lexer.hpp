#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "relcorr/errors.hpp"

namespace relcorr {

enum class TokKind {
  Ident,        // bare identifier
  PrimedIdent,  // identifier immediately followed by '
  Int,          // decimal integer literal (no sign)
  CharLit,      // 'c'
  StringLit,    // "..."
  Punct,        // operator or punctuation, text in `text`
  End,
};

struct Token {
  TokKind kind;
  std::string text;      // identifier name (without prime), punct text
  std::int64_t value;    // Int / CharLit value
  SourcePos pos;

  bool is_punct(std::string_view p) const {
    return kind == TokKind::Punct && text == p;
  }
  bool is_ident(std::string_view name) const {
    return kind == TokKind::Ident && text == name;
  }
};

/// Tokenizer shared by the space, spec and program DSLs.
///
/// Multi-character operators: ** .. && || == != <= >= ; '#' starts a
/// comment running to end of line.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i < src.size() && src[i] == '\n') {
        ++pos.line;
        pos.col = 1;
      } else {
        ++pos.col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos start = pos;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_'))
        ++j;
      std::string name(src.substr(i, j - i));
      advance(j - i);
      if (i < src.size() && src[i] == '\'') {
        advance(1);
        out.push_back({TokKind::PrimedIdent, std::move(name), 0, start});
      } else {
        out.push_back({TokKind::Ident, std::move(name), 0, start});
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      std::string digits(src.substr(i, j - i));
      std::int64_t v = 0;
      for (char d : digits) {
        if (v > (INT64_MAX - (d - '0')) / 10)
          throw ParseError(start, "integer literal overflows 64 bits");
        v = v * 10 + (d - '0');
      }
      advance(j - i);
      out.push_back({TokKind::Int, std::move(digits), v, start});
      continue;
    }
    if (c == '\'') {
      if (i + 2 >= src.size() || src[i + 2] != '\'')
        throw ParseError(start, "malformed character literal");
      char ch = src[i + 1];
      advance(3);
      out.push_back({TokKind::CharLit, std::string(1, ch),
                     static_cast<std::int64_t>(static_cast<unsigned char>(ch)),
                     start});
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"')
        throw ParseError(start, "unterminated string literal");
      std::string s(src.substr(i + 1, j - i - 1));
      advance(j - i + 1);
      out.push_back({TokKind::StringLit, std::move(s), 0, start});
      continue;
    }
    // Longest-match punctuation.
    static constexpr std::string_view two_char[] = {"**", "..", "&&", "||",
                                                    "==", "!=", "<=", ">="};
    std::string_view rest = src.substr(i);
    bool matched = false;
    for (auto op : two_char) {
      if (rest.substr(0, 2) == op) {
        out.push_back({TokKind::Punct, std::string(op), 0, start});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view one_char = "{}();:=<>+-*/%![],.";
    if (one_char.find(c) != std::string_view::npos) {
      out.push_back({TokKind::Punct, std::string(1, c), 0, start});
      advance(1);
      continue;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  }
  out.push_back({TokKind::End, "", 0, pos});
  return out;
}

/// Cursor over a token stream with the usual expect/accept helpers.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(int ahead = 0) const {
    std::size_t k = idx_ + static_cast<std::size_t>(ahead);
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != TokKind::End) ++idx_;
    return t;
  }
  bool accept_punct(std::string_view p) {
    if (peek().is_punct(p)) {
      ++idx_;
      return true;
    }
    return false;
  }
  bool accept_keyword(std::string_view name) {
    if (peek().is_ident(name)) {
      ++idx_;
      return true;
    }
    return false;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p))
      throw ParseError(peek().pos, "expected '" + std::string(p) + "'");
  }
  void expect_keyword(std::string_view name) {
    if (!accept_keyword(name))
      throw ParseError(peek().pos, "expected '" + std::string(name) + "'");
  }
  std::string expect_ident(std::string_view what) {
    if (peek().kind != TokKind::Ident)
      throw ParseError(peek().pos, "expected " + std::string(what));
    return next().text;
  }
  std::int64_t expect_int(std::string_view what) {
    bool neg = false;
    if (peek().is_punct("-")) {
      neg = true;
      ++idx_;
    }
    if (peek().kind != TokKind::Int)
      throw ParseError(peek().pos, "expected " + std::string(what));
    std::int64_t v = next().value;
    return neg ? -v : v;
  }
  bool at_end() const { return peek().kind == TokKind::End; }

 private:
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

}  // namespace relcorr
