#include "synthrl/corpus/generate.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <set>
#include <span>
#include <tuple>

#include "synthrl/minilang/ast.hpp"
#include "synthrl/minilang/outcome.hpp"
#include "synthrl/minilang/parser.hpp"

namespace synthrl::corpus {

using minilang::Expr;
using minilang::TestCase;
using minilang::Token;

namespace {

constexpr int kMaxRedraws = 100;

int precedence(char op) { return (op == '+' || op == '-') ? 1 : 2; }

std::unique_ptr<Expr> random_expr(int n_ops, Rng& rng) {
  auto node = std::make_unique<Expr>();
  if (n_ops == 0) {
    if (rng.next_double() < 0.65) {
      node->kind = Expr::Kind::Variable;
      node->var = "abc"[rng.uniform_int(0, 2)];
    } else {
      node->kind = Expr::Kind::Literal;
      node->literal = rng.uniform_int(0, 9);
    }
    return node;
  }
  node->kind = Expr::Kind::Binary;
  // Division and modulo are rarer: they constrain test inputs heavily.
  const double roll = rng.next_double();
  if (roll < 0.30) node->op = '+';
  else if (roll < 0.60) node->op = '-';
  else if (roll < 0.80) node->op = '*';
  else if (roll < 0.90) node->op = '/';
  else node->op = '%';
  const int left_ops = static_cast<int>(rng.uniform_int(0, n_ops - 1));
  node->lhs = random_expr(left_ops, rng);
  node->rhs = random_expr(n_ops - 1 - left_ops, rng);
  return node;
}

// Renders with minimal parentheses: the grammar is left-associative, so a
// binary right child needs parentheses already at equal precedence.
void render_expr(const Expr& expr, std::vector<Token>& out) {
  switch (expr.kind) {
    case Expr::Kind::Variable:
      out.push_back(minilang::variable_token(expr.var));
      return;
    case Expr::Kind::Literal:
      out.push_back(minilang::integer_token(expr.literal));
      return;
    case Expr::Kind::Binary: {
      auto child = [&](const Expr& c, bool right) {
        const bool parens =
            c.kind == Expr::Kind::Binary &&
            (precedence(c.op) < precedence(expr.op) ||
             (right && precedence(c.op) == precedence(expr.op)));
        if (parens) out.push_back(minilang::punct_token("("));
        render_expr(c, out);
        if (parens) out.push_back(minilang::punct_token(")"));
      };
      child(*expr.lhs, false);
      out.push_back(minilang::op_token(std::string(1, expr.op)));
      child(*expr.rhs, true);
      return;
    }
  }
}

std::vector<Token> render_expr(const Expr& expr) {
  std::vector<Token> out;
  render_expr(expr, out);
  return out;
}

void append(std::vector<Token>& out, std::span<const Token> tokens) {
  out.insert(out.end(), tokens.begin(), tokens.end());
}

struct ProgramDraw {
  std::vector<Token> program;
  std::vector<std::string> description;
};

std::vector<std::string> words(std::initializer_list<std::string_view> ws) {
  std::vector<std::string> out;
  for (auto w : ws) out.emplace_back(w);
  return out;
}

void append_texts(std::vector<std::string>& out, std::span<const Token> tokens) {
  for (const Token& t : tokens) out.push_back(t.text);
}

ProgramDraw draw_tier1(Rng& rng) {
  auto expr = random_expr(static_cast<int>(rng.uniform_int(1, 4)), rng);
  auto expr_tokens = render_expr(*expr);

  ProgramDraw draw;
  draw.program.push_back(minilang::keyword_token("return"));
  append(draw.program, expr_tokens);

  draw.description = words({"given", "inputs", "a", ",", "b", ",", "c", "compute"});
  append_texts(draw.description, expr_tokens);
  return draw;
}

ProgramDraw draw_tier2(Rng& rng) {
  auto e1 = render_expr(*random_expr(static_cast<int>(rng.uniform_int(1, 4)), rng));
  auto e2 = render_expr(*random_expr(static_cast<int>(rng.uniform_int(1, 4)), rng));
  const char var = "abc"[rng.uniform_int(0, 2)];
  const char* cmps[] = {"<", ">", "=="};
  const std::string cmp = cmps[rng.uniform_int(0, 2)];
  const std::int64_t lit = rng.uniform_int(0, 9);

  ProgramDraw draw;
  auto& p = draw.program;
  p.push_back(minilang::keyword_token("if"));
  p.push_back(minilang::variable_token(var));
  p.push_back(minilang::op_token(cmp));
  p.push_back(minilang::integer_token(lit));
  p.push_back(minilang::punct_token("{"));
  p.push_back(minilang::keyword_token("return"));
  append(p, e1);
  p.push_back(minilang::punct_token("}"));
  p.push_back(minilang::keyword_token("else"));
  p.push_back(minilang::punct_token("{"));
  p.push_back(minilang::keyword_token("return"));
  append(p, e2);
  p.push_back(minilang::punct_token("}"));

  draw.description = words({"compute"});
  append_texts(draw.description, e1);
  draw.description.push_back("if");
  draw.description.push_back(std::string(1, var));
  draw.description.push_back(cmp);
  draw.description.push_back(std::to_string(lit));
  draw.description.push_back("otherwise");
  append_texts(draw.description, e2);
  return draw;
}

ProgramDraw draw_tier3(Rng& rng) {
  auto expr = random_expr(static_cast<int>(rng.uniform_int(1, 4)), rng);
  auto expr_tokens = render_expr(*expr);
  // x = x + <expr> needs parentheses when <expr> is a sum or difference.
  const bool parens = expr->kind == Expr::Kind::Binary && precedence(expr->op) == 1;

  ProgramDraw draw;
  auto& p = draw.program;
  p.push_back(minilang::variable_token('x'));
  p.push_back(minilang::punct_token("="));
  p.push_back(minilang::integer_token(0));
  p.push_back(minilang::punct_token(";"));
  p.push_back(minilang::keyword_token("loop"));
  p.push_back(minilang::variable_token('c'));
  p.push_back(minilang::punct_token("{"));
  p.push_back(minilang::variable_token('x'));
  p.push_back(minilang::punct_token("="));
  p.push_back(minilang::variable_token('x'));
  p.push_back(minilang::op_token("+"));
  if (parens) p.push_back(minilang::punct_token("("));
  append(p, expr_tokens);
  if (parens) p.push_back(minilang::punct_token(")"));
  p.push_back(minilang::punct_token("}"));
  p.push_back(minilang::punct_token(";"));
  p.push_back(minilang::keyword_token("return"));
  p.push_back(minilang::variable_token('x'));

  draw.description = words({"starting", "from", "0", "repeat", "c", "times", "add"});
  append_texts(draw.description, expr_tokens);
  return draw;
}

ProgramDraw draw_program(int tier, Rng& rng) {
  switch (tier) {
    case 1: return draw_tier1(rng);
    case 2: return draw_tier2(rng);
    case 3: return draw_tier3(rng);
    default: throw std::invalid_argument("tier must be 1, 2 or 3");
  }
}

TestCase draw_inputs(int tier, Rng& rng) {
  TestCase test;
  test.a = rng.uniform_int(-9, 9);
  test.b = rng.uniform_int(-9, 9);
  test.c = tier == 3 ? rng.uniform_int(0, 9) : rng.uniform_int(-9, 9);
  return test;
}

}  // namespace

std::vector<Token> random_program(int tier, Rng& rng) {
  return draw_program(tier, rng).program;
}

ProblemSpec generate_problem(int tier, Rng& rng) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    ProgramDraw draw = draw_program(tier, rng);
    auto parsed = minilang::parse(draw.program);
    const auto& program = std::get<minilang::Program>(parsed);

    const int n_hidden = static_cast<int>(rng.uniform_int(5, 10));
    const int n_tests = 2 + n_hidden;
    std::vector<TestCase> tests;
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;
    bool ok = true;
    for (int i = 0; i < n_tests && ok; ++i) {
      ok = false;
      for (int redraw = 0; redraw < kMaxRedraws; ++redraw) {
        TestCase test = draw_inputs(tier, rng);
        if (!seen.insert({test.a, test.b, test.c}).second) continue;
        auto result = minilang::execute(program, test);
        if (!result.ok()) continue;
        test.expected = *result.value;
        tests.push_back(test);
        ok = true;
        break;
      }
    }
    if (!ok) continue;

    // "return 0" must fail at least one hidden test.
    bool discriminative = false;
    for (int i = 2; i < n_tests; ++i) {
      if (tests[i].expected != 0) discriminative = true;
    }
    if (!discriminative) continue;

    ProblemSpec spec;
    spec.tier = tier;
    spec.description = std::move(draw.description);
    spec.ground_truth = std::move(draw.program);
    spec.example_tests.assign(tests.begin(), tests.begin() + 2);
    spec.hidden_tests.assign(tests.begin() + 2, tests.end());

    auto report = minilang::evaluate_program(spec.ground_truth, spec.all_tests());
    if (report.category != minilang::Outcome::PassedTest) continue;
    return spec;
  }
  throw GenerationError("problem generation retry budget exhausted");
}

Dataset generate_dataset(const DatasetConfig& config) {
  Dataset dataset;
  dataset.split = config.split;
  dataset.generator_seed = config.seed;

  const int n = config.problems;
  int n1 = static_cast<int>(n * config.tier1_frac);
  int n2 = static_cast<int>(n * config.tier2_frac);
  int n3 = n - n1 - n2;
  if (n3 < 0) throw std::invalid_argument("tier fractions exceed 1");

  std::vector<int> tiers;
  tiers.insert(tiers.end(), n1, 1);
  tiers.insert(tiers.end(), n2, 2);
  tiers.insert(tiers.end(), n3, 3);

  Rng rng(config.seed);
  // Fisher-Yates so tiers interleave deterministically.
  for (std::size_t i = tiers.size(); i > 1; --i) {
    std::swap(tiers[i - 1], tiers[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
  }

  for (std::size_t i = 0; i < tiers.size(); ++i) {
    ProblemSpec spec = generate_problem(tiers[i], rng);
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%04zu", config.split.c_str(), i);
    spec.id = id;
    dataset.problems.push_back(std::move(spec));
  }
  return dataset;
}

}  // namespace synthrl::corpus
