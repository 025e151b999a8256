#include "synthrl/minilang/token.hpp"

#include <cctype>

namespace synthrl::minilang {

namespace {

bool is_operator(std::string_view s) {
  return s == "+" || s == "-" || s == "*" || s == "/" || s == "%" ||
         s == "<" || s == ">" || s == "==";
}

bool is_punct(std::string_view s) {
  return s == "(" || s == ")" || s == "{" || s == "}" || s == "=" || s == ";";
}

bool is_keyword(std::string_view s) {
  return s == "return" || s == "if" || s == "else" || s == "loop";
}

bool is_integer(std::string_view s) {
  if (s.empty() || s.size() > 9) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

}  // namespace

std::optional<Token> classify(std::string_view word) {
  if (is_variable_name(word)) return Token{TokenKind::Variable, std::string(word)};
  if (is_integer(word)) return Token{TokenKind::Integer, std::string(word)};
  if (is_operator(word)) return Token{TokenKind::Operator, std::string(word)};
  if (is_punct(word)) return Token{TokenKind::Punct, std::string(word)};
  if (is_keyword(word)) return Token{TokenKind::Keyword, std::string(word)};
  return std::nullopt;
}

std::string render(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

std::variant<std::vector<Token>, LexError> lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  std::size_t word_index = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    auto token = classify(text.substr(start, i - start));
    if (!token) return LexError{word_index};
    tokens.push_back(std::move(*token));
    ++word_index;
  }
  return tokens;
}

}  // namespace synthrl::minilang
