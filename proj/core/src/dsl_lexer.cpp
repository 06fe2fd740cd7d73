#include <polygame/errors.hpp>

#include <cctype>

#include "dsl_internal.hpp"

namespace polygame::dsl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> lex(const std::string& source) {
  std::vector<Token> tokens;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  const std::size_t n = source.size();

  auto push = [&](TokKind kind, std::string text, SourceLoc loc) {
    tokens.push_back({kind, std::move(text), loc});
  };
  auto bump = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (source[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < n) {
    const char c = source[i];
    const SourceLoc loc{line, col};

    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump(1);
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') bump(1);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < n && ident_char(source[j])) ++j;
      push(TokKind::Ident, source.substr(i, j - i), loc);
      bump(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
      // "0..3" is INT DOTDOT INT, not a decimal.
      if (j < n && source[j] == '.' && !(j + 1 < n && source[j + 1] == '.')) {
        ++j;
        if (j >= n || !std::isdigit(static_cast<unsigned char>(source[j]))) {
          throw Error("SyntaxError", "malformed decimal literal", loc.to_string());
        }
        while (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
      }
      push(TokKind::Number, source.substr(i, j - i), loc);
      bump(j - i);
      continue;
    }

    auto two = [&](char a, char b) { return c == a && i + 1 < n && source[i + 1] == b; };
    if (two('-', '>')) {
      push(TokKind::Arrow, "->", loc);
      bump(2);
      continue;
    }
    if (two('.', '.')) {
      push(TokKind::DotDot, "..", loc);
      bump(2);
      continue;
    }
    if (two('!', '=')) {
      push(TokKind::Ne, "!=", loc);
      bump(2);
      continue;
    }
    if (two('<', '=')) {
      push(TokKind::Le, "<=", loc);
      bump(2);
      continue;
    }
    if (two('>', '=')) {
      push(TokKind::Ge, ">=", loc);
      bump(2);
      continue;
    }
    if (two('&', '&')) {
      push(TokKind::And, "&", loc);
      bump(2);
      continue;
    }
    if (two('|', '|')) {
      push(TokKind::Or, "|", loc);
      bump(2);
      continue;
    }

    TokKind kind;
    switch (c) {
      case '[': kind = TokKind::LBracket; break;
      case ']': kind = TokKind::RBracket; break;
      case '(': kind = TokKind::LParen; break;
      case ')': kind = TokKind::RParen; break;
      case '{': kind = TokKind::LBrace; break;
      case '}': kind = TokKind::RBrace; break;
      case ',': kind = TokKind::Comma; break;
      case ';': kind = TokKind::Semicolon; break;
      case ':': kind = TokKind::Colon; break;
      case '\'': kind = TokKind::Prime; break;
      case '+': kind = TokKind::Plus; break;
      case '-': kind = TokKind::Minus; break;
      case '*': kind = TokKind::Star; break;
      case '/': kind = TokKind::Slash; break;
      case '=': kind = TokKind::Eq; break;
      case '<': kind = TokKind::Lt; break;
      case '>': kind = TokKind::Gt; break;
      case '&': kind = TokKind::And; break;
      case '|': kind = TokKind::Or; break;
      case '!': kind = TokKind::Not; break;
      default:
        throw Error("SyntaxError", std::string("unexpected character '") + c + "'",
                    loc.to_string());
    }
    push(kind, std::string(1, c), loc);
    bump(1);
  }
  tokens.push_back({TokKind::End, "", {line, col}});
  return tokens;
}

}  // namespace polygame::dsl
