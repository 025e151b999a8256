#pragma once

#include <span>
#include <variant>

#include "synthrl/minilang/ast.hpp"
#include "synthrl/minilang/token.hpp"

namespace synthrl::minilang {

struct ParseError {
  // Index of the first offending token; equals tokens.size() when the
  // input ended where more tokens were required.
  std::size_t offset;
};

// Deterministic LL(1) parse of
//   program := stmt (';' stmt)*
//   stmt    := var '=' expr
//            | 'return' expr
//            | 'if' expr cmp expr '{' program '}' 'else' '{' program '}'
//            | 'loop' expr '{' program '}'
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/'|'%') factor)*
//   factor  := var | int | '(' expr ')'
//   cmp     := '<' | '>' | '=='
// Empty input and trailing tokens after a complete program are errors.
std::variant<Program, ParseError> parse(std::span<const Token> tokens);

}  // namespace synthrl::minilang
