#include "synthrl/corpus/vocabulary.hpp"

#include <stdexcept>

namespace synthrl::corpus {

namespace {

// Description template words. "if" is shared with the keyword entry and is
// deliberately absent here.
const char* kDescriptionWords[] = {
    "given",  "inputs", "compute", "otherwise", "repeat", "times",
    "starting", "from", "add",     "the",       "value",  "result",
    "number", "of",     "is",      "and",       "to",     "by",
    "with",   "for",    "when",    "then",      "each",   "final",
    "total",  "answer", "output",  "using",     ",",
};

const char* kDslTokens[] = {
    "a", "b", "c", "x", "y", "z",
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
    "+", "-", "*", "/", "%", "<", ">", "==",
    "(", ")", "{", "}", "=", ";",
    "return", "if", "else", "loop",
};

}  // namespace

Vocabulary::Vocabulary() {
  add("<pad>");
  pad_ = 0;
  bos_ = size();
  add("<bos>");
  eos_ = size();
  add("<eos>");
  sep_ = size();
  add("<sep>");

  first_outcome_ = size();
  add("<u:compile>");
  add("<u:runtime>");
  add("<u:fail>");
  add("<u:pass>");

  first_subtype_ = size();
  add("<c:syntax>");
  add("<c:undef>");
  add("<c:divzero>");
  add("<c:noreturn>");
  add("<c:steplimit>");
  add("<c:wrong>");
  add("<c:none>");

  for (const char* token : kDslTokens) add(token);
  for (const char* word : kDescriptionWords) add(word);
}

void Vocabulary::add(std::string token) {
  auto [it, inserted] = token_to_id_.emplace(token, size());
  if (!inserted) throw std::logic_error("duplicate vocabulary token: " + token);
  id_to_token_.push_back(std::move(token));
}

std::optional<int> Vocabulary::id_of(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token_of(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("vocabulary id out of range");
  return id_to_token_[id];
}

int Vocabulary::outcome_token(minilang::Outcome u) const {
  return first_outcome_ + static_cast<int>(u);
}

int Vocabulary::subtype_token(minilang::ErrorSubtype c) const {
  return first_subtype_ + static_cast<int>(c);
}

std::vector<int> Vocabulary::ids_of(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& token : tokens) {
    auto id = id_of(token);
    if (!id) throw std::invalid_argument("unknown vocabulary token: " + token);
    ids.push_back(*id);
  }
  return ids;
}

std::vector<int> Vocabulary::ids_of_program(std::span<const minilang::Token> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const minilang::Token& token : tokens) {
    auto id = id_of(token.text);
    if (!id) throw std::invalid_argument("unknown program token: " + token.text);
    ids.push_back(*id);
  }
  return ids;
}

std::vector<std::string> Vocabulary::tokens_of(std::span<const int> ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) tokens.push_back(token_of(id));
  return tokens;
}

bool Vocabulary::is_program_token(int id) const {
  if (id < 0 || id >= size()) return false;
  return minilang::classify(id_to_token_[id]).has_value();
}

std::optional<std::vector<minilang::Token>> decode_program(const Vocabulary& vocab,
                                                           std::span<const int> ids) {
  std::vector<minilang::Token> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= vocab.size()) return std::nullopt;
    auto token = minilang::classify(vocab.token_of(id));
    if (!token) return std::nullopt;
    tokens.push_back(std::move(*token));
  }
  return tokens;
}

minilang::OutcomeReport evaluate_ids(const Vocabulary& vocab, std::span<const int> ids,
                                     std::span<const minilang::TestCase> tests) {
  auto tokens = decode_program(vocab, ids);
  if (!tokens) {
    minilang::OutcomeReport report;
    report.category = minilang::Outcome::CompileError;
    report.subtype = minilang::ErrorSubtype::Syntax;
    return report;
  }
  return minilang::evaluate_program(*tokens, tests);
}

}  // namespace synthrl::corpus
