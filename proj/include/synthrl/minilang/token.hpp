#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace synthrl::minilang {

enum class TokenKind { Variable, Integer, Operator, Punct, Keyword };

struct Token {
  TokenKind kind;
  std::string text;

  bool operator==(const Token&) const = default;
};

inline bool is_variable_name(std::string_view s) {
  return s.size() == 1 && (s == "a" || s == "b" || s == "c" || s == "x" ||
                           s == "y" || s == "z");
}

// Maps a surface word to its token, or nullopt if the word is not part of
// the language. Integer literals are non-negative decimals of at most nine
// digits; negative values only arise through subtraction.
std::optional<Token> classify(std::string_view word);

// Canonical text form: token texts joined with single spaces.
std::string render(std::span<const Token> tokens);

struct LexError {
  std::size_t offset;  // index of the first offending word
};

// Splits on whitespace and classifies each word. render() followed by lex()
// reproduces the token sequence exactly.
std::variant<std::vector<Token>, LexError> lex(std::string_view text);

inline Token variable_token(char name) {
  return Token{TokenKind::Variable, std::string(1, name)};
}

inline Token integer_token(std::int64_t value) {
  return Token{TokenKind::Integer, std::to_string(value)};
}

inline Token op_token(std::string_view text) {
  return Token{TokenKind::Operator, std::string(text)};
}

inline Token punct_token(std::string_view text) {
  return Token{TokenKind::Punct, std::string(text)};
}

inline Token keyword_token(std::string_view text) {
  return Token{TokenKind::Keyword, std::string(text)};
}

}  // namespace synthrl::minilang
