#include "random_programs.hpp"

namespace synthrl::testsupport {

using minilang::Token;
using minilang::TokenKind;

namespace {

const char* kAllVars = "abcxyz";

Token random_any_token(Rng& rng) {
  static const Token pool[] = {
      minilang::variable_token('a'),  minilang::variable_token('x'),
      minilang::integer_token(3),     minilang::integer_token(0),
      minilang::op_token("+"),        minilang::op_token("/"),
      minilang::op_token("=="),       minilang::punct_token("("),
      minilang::punct_token(")"),     minilang::punct_token("{"),
      minilang::punct_token("}"),     minilang::punct_token("="),
      minilang::punct_token(";"),     minilang::keyword_token("return"),
      minilang::keyword_token("if"),  minilang::keyword_token("else"),
      minilang::keyword_token("loop")};
  return pool[rng.uniform_int(0, static_cast<int>(std::size(pool)) - 1)];
}

void gen_expr(std::vector<Token>& out, Rng& rng, int depth) {
  const double roll = rng.next_double();
  if (depth >= 3 || roll < 0.45) {
    if (rng.next_double() < 0.7) {
      // x, y, z reads included: they may be unassigned.
      out.push_back(minilang::variable_token(kAllVars[rng.uniform_int(0, 5)]));
    } else {
      out.push_back(minilang::integer_token(rng.uniform_int(0, rng.next_double() < 0.9 ? 9 : 999)));
    }
    return;
  }
  if (roll < 0.6) {
    out.push_back(minilang::punct_token("("));
    gen_expr(out, rng, depth + 1);
    out.push_back(minilang::punct_token(")"));
    return;
  }
  const char* ops[] = {"+", "-", "*", "/", "%"};
  gen_expr(out, rng, depth + 1);
  out.push_back(minilang::op_token(ops[rng.uniform_int(0, 4)]));
  gen_expr(out, rng, depth + 1);
}

void gen_stmt(std::vector<Token>& out, Rng& rng, int depth);

void gen_stmt_list(std::vector<Token>& out, Rng& rng, int depth, bool want_return) {
  const int n = static_cast<int>(rng.uniform_int(1, 3));
  for (int i = 0; i < n; ++i) {
    if (i > 0) out.push_back(minilang::punct_token(";"));
    gen_stmt(out, rng, depth);
  }
  if (want_return && rng.next_double() < 0.8) {
    out.push_back(minilang::punct_token(";"));
    out.push_back(minilang::keyword_token("return"));
    gen_expr(out, rng, 1);
  }
}

void gen_stmt(std::vector<Token>& out, Rng& rng, int depth) {
  const double roll = rng.next_double();
  if (depth >= 2 || roll < 0.5) {
    if (roll < 0.12) {
      out.push_back(minilang::keyword_token("return"));
      gen_expr(out, rng, 1);
      return;
    }
    out.push_back(minilang::variable_token(kAllVars[rng.uniform_int(0, 5)]));
    out.push_back(minilang::punct_token("="));
    gen_expr(out, rng, 1);
    return;
  }
  if (roll < 0.75) {
    out.push_back(minilang::keyword_token("if"));
    gen_expr(out, rng, 2);
    const char* cmps[] = {"<", ">", "=="};
    out.push_back(minilang::op_token(cmps[rng.uniform_int(0, 2)]));
    gen_expr(out, rng, 2);
    out.push_back(minilang::punct_token("{"));
    gen_stmt_list(out, rng, depth + 1, false);
    out.push_back(minilang::punct_token("}"));
    out.push_back(minilang::keyword_token("else"));
    out.push_back(minilang::punct_token("{"));
    gen_stmt_list(out, rng, depth + 1, false);
    out.push_back(minilang::punct_token("}"));
    return;
  }
  out.push_back(minilang::keyword_token("loop"));
  if (rng.next_double() < 0.3) {
    out.push_back(minilang::integer_token(rng.uniform_int(50, 200)));
  } else {
    gen_expr(out, rng, 2);
  }
  out.push_back(minilang::punct_token("{"));
  gen_stmt_list(out, rng, depth + 1, false);
  out.push_back(minilang::punct_token("}"));
}

std::vector<Token> structured_program(Rng& rng) {
  std::vector<Token> out;
  gen_stmt_list(out, rng, 0, true);
  return out;
}

// Two clamped-to-100 loops overrun the default 10k step budget.
std::vector<Token> deep_loop_program(Rng& rng) {
  std::vector<Token> out;
  const int levels = static_cast<int>(rng.uniform_int(2, 3));
  for (int i = 0; i < levels; ++i) {
    out.push_back(minilang::keyword_token("loop"));
    out.push_back(minilang::integer_token(100));
    out.push_back(minilang::punct_token("{"));
  }
  out.push_back(minilang::variable_token('x'));
  out.push_back(minilang::punct_token("="));
  out.push_back(minilang::integer_token(1));
  for (int i = 0; i < levels; ++i) out.push_back(minilang::punct_token("}"));
  out.push_back(minilang::punct_token(";"));
  out.push_back(minilang::keyword_token("return"));
  out.push_back(minilang::variable_token('x'));
  return out;
}

std::vector<Token> mutated_program(Rng& rng) {
  std::vector<Token> tokens = structured_program(rng);
  const int edits = static_cast<int>(rng.uniform_int(1, 2));
  for (int e = 0; e < edits && !tokens.empty(); ++e) {
    const std::size_t at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(tokens.size()) - 1));
    switch (rng.uniform_int(0, 2)) {
      case 0: tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(at)); break;
      case 1: tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), random_any_token(rng)); break;
      default: tokens[at] = random_any_token(rng); break;
    }
  }
  return tokens;
}

std::vector<Token> token_soup(Rng& rng) {
  std::vector<Token> tokens;
  const int n = static_cast<int>(rng.uniform_int(0, 12));
  for (int i = 0; i < n; ++i) tokens.push_back(random_any_token(rng));
  return tokens;
}

}  // namespace

std::vector<Token> random_test_program(Rng& rng) {
  const double roll = rng.next_double();
  if (roll < 0.15) return token_soup(rng);
  if (roll < 0.35) return mutated_program(rng);
  if (roll < 0.42) return deep_loop_program(rng);
  return structured_program(rng);
}

std::vector<minilang::TestCase> random_test_inputs(Rng& rng, int count) {
  std::vector<minilang::TestCase> tests;
  for (int i = 0; i < count; ++i) {
    minilang::TestCase test;
    test.a = rng.uniform_int(-9, 9);
    test.b = rng.uniform_int(-9, 9);
    test.c = rng.uniform_int(-9, 9);
    test.expected = rng.uniform_int(-9, 9);
    tests.push_back(test);
  }
  return tests;
}

}  // namespace synthrl::testsupport
