#pragma once

#include <polygame/dsl.hpp>

#include <string>
#include <vector>

namespace polygame::dsl {

enum class TokKind {
  Ident,
  Number,
  LBracket,
  RBracket,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Colon,
  Prime,
  Plus,
  Minus,
  Star,
  Slash,
  Arrow,     // ->
  DotDot,    // ..
  Eq,        // =
  Ne,        // !=
  Lt,
  Le,
  Gt,
  Ge,
  And,       // & or &&
  Or,        // | or ||
  Not,       // !
  End,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  SourceLoc loc;
};

std::vector<Token> lex(const std::string& source);

}  // namespace polygame::dsl
