#include "lexer.hpp"

#include <cctype>

namespace cohnet::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

} // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n')
        advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j]))
        ++j;
      while (j > i + 1 && text[j - 1] == '.')
        --j;
      t.kind = TokKind::ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      int base = 10;
      if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
        base = 16;
        j += 2;
      }
      std::size_t digits_at = j;
      while (j < text.size() && std::isxdigit(static_cast<unsigned char>(text[j])) &&
             (base == 16 || std::isdigit(static_cast<unsigned char>(text[j]))))
        ++j;
      if (j == digits_at)
        throw ParseError(line, col, "malformed number");
      t.kind = TokKind::number;
      t.text = std::string(text.substr(i, j - i));
      t.value = std::stoull(std::string(text.substr(digits_at, j - digits_at)), nullptr, base);
      advance(j - i);
    } else if (text.substr(i, 2) == "->" || text.substr(i, 2) == "|-") {
      t.kind = TokKind::punct;
      t.text = std::string(text.substr(i, 2));
      advance(2);
    } else if (std::string_view(";:,()[]{}=").find(c) != std::string_view::npos) {
      t.kind = TokKind::punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

} // namespace cohnet::detail
