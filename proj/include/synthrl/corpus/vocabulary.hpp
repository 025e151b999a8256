#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synthrl/minilang/outcome.hpp"
#include "synthrl/minilang/token.hpp"

namespace synthrl::corpus {

// Shared model vocabulary. Built from a fixed static list, never from data,
// so ids are stable across runs and machines. Ids are dense 0..|V|-1 and
// PAD is always 0.
class Vocabulary {
 public:
  Vocabulary();

  int size() const { return static_cast<int>(id_to_token_.size()); }

  std::optional<int> id_of(std::string_view token) const;
  const std::string& token_of(int id) const;

  int pad() const { return pad_; }
  int bos() const { return bos_; }
  int eos() const { return eos_; }
  int sep() const { return sep_; }

  int outcome_token(minilang::Outcome u) const;
  int subtype_token(minilang::ErrorSubtype c) const;

  // Encodes each surface form, throwing on unknown tokens.
  std::vector<int> ids_of(std::span<const std::string> tokens) const;
  std::vector<int> ids_of_program(std::span<const minilang::Token> tokens) const;

  // Maps a model-produced id sequence back to surface forms.
  std::vector<std::string> tokens_of(std::span<const int> ids) const;

  // True when the id is a surface form of the programming language itself
  // (as opposed to a description word or a special/tag token).
  bool is_program_token(int id) const;

 private:
  void add(std::string token);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
  int pad_ = 0, bos_ = 0, eos_ = 0, sep_ = 0;
  int first_outcome_ = 0;  // four outcome tags, contiguous
  int first_subtype_ = 0;  // seven subtype tags, contiguous
};

// Interprets a model-produced id sequence as program source. Returns the
// token sequence, or nullopt if any id is not a program token (the caller
// treats that as a compile error).
std::optional<std::vector<minilang::Token>> decode_program(const Vocabulary& vocab,
                                                           std::span<const int> ids);

// Convenience wrapper: decode then evaluate; undecodable sequences report
// CompileError/syntax.
minilang::OutcomeReport evaluate_ids(const Vocabulary& vocab, std::span<const int> ids,
                                     std::span<const minilang::TestCase> tests);

}  // namespace synthrl::corpus
