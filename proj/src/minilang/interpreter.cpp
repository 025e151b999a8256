#include "synthrl/minilang/interpreter.hpp"

#include <array>
#include <cstdint>
#include <variant>

namespace synthrl::minilang {

namespace {

constexpr std::int64_t kInt64Min = INT64_MIN;

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}

std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                   static_cast<std::uint64_t>(b));
}

std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                   static_cast<std::uint64_t>(b));
}

struct Halt {
  enum class Why { Return, Error } why;
  std::int64_t value = 0;              // Return
  RuntimeErrorKind error = RuntimeErrorKind::NoReturn;  // Error
};

class Evaluator {
 public:
  Evaluator(const TestCase& test, int step_budget) : budget_(step_budget) {
    bind('a', test.a);
    bind('b', test.b);
    bind('c', test.c);
  }

  std::optional<Halt> run(const std::vector<Stmt>& stmts) {
    for (const Stmt& stmt : stmts) {
      auto halt = exec(stmt);
      if (halt) return halt;
    }
    return std::nullopt;
  }

 private:
  static int slot(char var) {
    switch (var) {
      case 'a': return 0;
      case 'b': return 1;
      case 'c': return 2;
      case 'x': return 3;
      case 'y': return 4;
      case 'z': return 5;
    }
    return 0;
  }

  void bind(char var, std::int64_t value) {
    values_[slot(var)] = value;
    bound_[slot(var)] = true;
  }

  // Returns false when the step budget is exhausted.
  bool charge() { return ++steps_ <= budget_; }

  std::optional<Halt> exec(const Stmt& stmt) {
    if (!charge()) return error(RuntimeErrorKind::StepLimit);
    switch (stmt.kind) {
      case Stmt::Kind::Assign: {
        auto v = eval(*stmt.expr);
        if (std::holds_alternative<Halt>(v)) return std::get<Halt>(v);
        bind(stmt.target, std::get<std::int64_t>(v));
        return std::nullopt;
      }
      case Stmt::Kind::Return: {
        auto v = eval(*stmt.expr);
        if (std::holds_alternative<Halt>(v)) return std::get<Halt>(v);
        return Halt{Halt::Why::Return, std::get<std::int64_t>(v)};
      }
      case Stmt::Kind::If: {
        auto lhs = eval(*stmt.expr);
        if (std::holds_alternative<Halt>(lhs)) return std::get<Halt>(lhs);
        auto rhs = eval(*stmt.rhs_expr);
        if (std::holds_alternative<Halt>(rhs)) return std::get<Halt>(rhs);
        const std::int64_t l = std::get<std::int64_t>(lhs);
        const std::int64_t r = std::get<std::int64_t>(rhs);
        bool taken = false;
        switch (stmt.cmp) {
          case CmpOp::Less: taken = l < r; break;
          case CmpOp::Greater: taken = l > r; break;
          case CmpOp::Equal: taken = l == r; break;
        }
        return run(taken ? stmt.body : stmt.else_body);
      }
      case Stmt::Kind::Loop: {
        auto count = eval(*stmt.expr);
        if (std::holds_alternative<Halt>(count)) return std::get<Halt>(count);
        std::int64_t n = std::get<std::int64_t>(count);
        if (n < 0) n = 0;
        if (n > kLoopClampMax) n = kLoopClampMax;
        for (std::int64_t i = 0; i < n; ++i) {
          auto halt = run(stmt.body);
          if (halt) return halt;
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  static std::optional<Halt> error(RuntimeErrorKind kind) {
    Halt h{Halt::Why::Error};
    h.error = kind;
    return h;
  }

  std::variant<std::int64_t, Halt> eval(const Expr& expr) {
    switch (expr.kind) {
      case Expr::Kind::Variable: {
        if (!charge()) return *error(RuntimeErrorKind::StepLimit);
        const int s = slot(expr.var);
        if (!bound_[s]) return *error(RuntimeErrorKind::UndefinedVar);
        return values_[s];
      }
      case Expr::Kind::Literal: {
        if (!charge()) return *error(RuntimeErrorKind::StepLimit);
        return expr.literal;
      }
      case Expr::Kind::Binary: {
        auto lhs = eval(*expr.lhs);
        if (std::holds_alternative<Halt>(lhs)) return lhs;
        auto rhs = eval(*expr.rhs);
        if (std::holds_alternative<Halt>(rhs)) return rhs;
        if (!charge()) return *error(RuntimeErrorKind::StepLimit);
        const std::int64_t l = std::get<std::int64_t>(lhs);
        const std::int64_t r = std::get<std::int64_t>(rhs);
        switch (expr.op) {
          case '+': return wrap_add(l, r);
          case '-': return wrap_sub(l, r);
          case '*': return wrap_mul(l, r);
          case '/':
            if (r == 0) return *error(RuntimeErrorKind::DivByZero);
            if (l == kInt64Min && r == -1) return kInt64Min;  // wraps
            return l / r;
          case '%':
            if (r == 0) return *error(RuntimeErrorKind::DivByZero);
            if (l == kInt64Min && r == -1) return std::int64_t{0};
            return l % r;
        }
        return std::int64_t{0};
      }
    }
    return std::int64_t{0};
  }

  std::array<std::int64_t, 6> values_{};
  std::array<bool, 6> bound_{};
  std::int64_t steps_ = 0;
  std::int64_t budget_;
};

}  // namespace

ExecResult execute(const Program& program, const TestCase& test, int step_budget) {
  Evaluator evaluator(test, step_budget);
  auto halt = evaluator.run(program.stmts);
  ExecResult result;
  if (!halt) {
    result.error = RuntimeErrorKind::NoReturn;
    return result;
  }
  if (halt->why == Halt::Why::Return) {
    result.value = halt->value;
    return result;
  }
  result.error = halt->error;
  return result;
}

}  // namespace synthrl::minilang
