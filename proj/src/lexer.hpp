#pragma once

// Shared tokenizer for the text formats (theories, interpretations,
// structures, schemas, instances).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cohnet/error.hpp"

namespace cohnet::detail {

enum class TokKind { ident, number, punct, end };

struct Token {
  TokKind kind = TokKind::end;
  std::string text;
  std::uint64_t value = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view text);

class TokenStream {
public:
  explicit TokenStream(std::string_view text) : toks_(tokenize(text)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size())
      ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokKind::end; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokKind::punct && peek(ahead).text == p;
  }
  bool is_keyword(std::string_view k, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokKind::ident && peek(ahead).text == k;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p))
      return false;
    next();
    return true;
  }
  bool accept_keyword(std::string_view k) {
    if (!is_keyword(k))
      return false;
    next();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p))
      fail("expected '" + std::string(p) + "'");
  }
  void expect_keyword(std::string_view k) {
    if (!accept_keyword(k))
      fail("expected '" + std::string(k) + "'");
  }
  std::string ident() {
    if (peek().kind != TokKind::ident)
      fail("expected identifier");
    return next().text;
  }
  std::uint64_t number() {
    if (peek().kind != TokKind::number)
      fail("expected number");
    return next().value;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
    std::string near = t.kind == TokKind::end ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, msg + " near " + near);
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace cohnet::detail
