#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "catforge/ctl/errors.hpp"

namespace catforge::ctl {

enum class TokKind {
  Ident,
  Int,
  Float,
  Str,
  KwIf,
  KwElse,
  KwFor,
  KwIn,
  KwReturn,
  KwAnd,
  KwOr,
  KwNot,
  KwTrue,
  KwFalse,
  KwNull,
  Assign,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Dot,
  Colon,
  End,
};

struct Token {
  TokKind kind;
  SourcePos pos;
  std::string text;            // identifier spelling
  std::uint64_t int_value = 0; // magnitude; sign is applied by the parser
  double float_value = 0.0;
  std::string str_value;       // decoded string literal
};

// Throws SyntaxError; never crashes on arbitrary bytes.
std::vector<Token> lex(std::string_view source);

}  // namespace catforge::ctl
