#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace synthrl::minilang {

struct Expr {
  enum class Kind { Variable, Literal, Binary };

  Kind kind;
  char var = 0;               // Variable: one of a,b,c,x,y,z
  std::int64_t literal = 0;   // Literal
  char op = 0;                // Binary: one of + - * / %
  std::unique_ptr<Expr> lhs;
  std::unique_ptr<Expr> rhs;
};

enum class CmpOp { Less, Greater, Equal };

struct Stmt {
  enum class Kind { Assign, Return, If, Loop };

  Kind kind;
  char target = 0;                 // Assign
  std::unique_ptr<Expr> expr;      // Assign value / Return value / If lhs / Loop count
  std::unique_ptr<Expr> rhs_expr;  // If rhs
  CmpOp cmp = CmpOp::Less;         // If
  std::vector<Stmt> body;          // If then-block / Loop body
  std::vector<Stmt> else_body;     // If else-block
};

struct Program {
  std::vector<Stmt> stmts;
};

}  // namespace synthrl::minilang
