#include "synthrl/minilang/parser.hpp"

#include <charconv>

namespace synthrl::minilang {

namespace {

// Recursive-descent parser over the token span. Failure unwinds through the
// ok flag; the first failure fixes error_offset.
class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {}

  std::variant<Program, ParseError> run() {
    if (tokens_.empty()) return ParseError{0};
    Program program;
    parse_stmt_list(program.stmts);
    if (ok_ && pos_ != tokens_.size()) fail(pos_);  // trailing tokens
    if (!ok_) return ParseError{error_offset_};
    return program;
  }

 private:
  bool at_end() const { return pos_ >= tokens_.size(); }

  const Token* peek() const { return at_end() ? nullptr : &tokens_[pos_]; }

  bool peek_is(TokenKind kind, std::string_view text) const {
    const Token* t = peek();
    return t != nullptr && t->kind == kind && t->text == text;
  }

  void fail(std::size_t offset) {
    if (ok_) {
      ok_ = false;
      error_offset_ = offset;
    }
  }

  bool expect(TokenKind kind, std::string_view text) {
    if (!ok_) return false;
    if (!peek_is(kind, text)) {
      fail(pos_);
      return false;
    }
    ++pos_;
    return true;
  }

  void parse_stmt_list(std::vector<Stmt>& out) {
    out.push_back(parse_stmt());
    while (ok_ && peek_is(TokenKind::Punct, ";")) {
      ++pos_;
      out.push_back(parse_stmt());
    }
  }

  Stmt parse_stmt() {
    Stmt stmt{};
    if (!ok_) return stmt;
    const Token* t = peek();
    if (t == nullptr) {
      fail(pos_);
      return stmt;
    }
    if (t->kind == TokenKind::Variable) {
      stmt.kind = Stmt::Kind::Assign;
      stmt.target = t->text[0];
      ++pos_;
      expect(TokenKind::Punct, "=");
      stmt.expr = parse_expr();
      return stmt;
    }
    if (t->kind == TokenKind::Keyword && t->text == "return") {
      stmt.kind = Stmt::Kind::Return;
      ++pos_;
      stmt.expr = parse_expr();
      return stmt;
    }
    if (t->kind == TokenKind::Keyword && t->text == "if") {
      stmt.kind = Stmt::Kind::If;
      ++pos_;
      stmt.expr = parse_expr();
      stmt.cmp = parse_cmp();
      stmt.rhs_expr = parse_expr();
      expect(TokenKind::Punct, "{");
      parse_stmt_list(stmt.body);
      expect(TokenKind::Punct, "}");
      expect(TokenKind::Keyword, "else");
      expect(TokenKind::Punct, "{");
      parse_stmt_list(stmt.else_body);
      expect(TokenKind::Punct, "}");
      return stmt;
    }
    if (t->kind == TokenKind::Keyword && t->text == "loop") {
      stmt.kind = Stmt::Kind::Loop;
      ++pos_;
      stmt.expr = parse_expr();
      expect(TokenKind::Punct, "{");
      parse_stmt_list(stmt.body);
      expect(TokenKind::Punct, "}");
      return stmt;
    }
    fail(pos_);
    return stmt;
  }

  CmpOp parse_cmp() {
    const Token* t = peek();
    if (t != nullptr && t->kind == TokenKind::Operator) {
      if (t->text == "<") {
        ++pos_;
        return CmpOp::Less;
      }
      if (t->text == ">") {
        ++pos_;
        return CmpOp::Greater;
      }
      if (t->text == "==") {
        ++pos_;
        return CmpOp::Equal;
      }
    }
    fail(pos_);
    return CmpOp::Less;
  }

  std::unique_ptr<Expr> parse_expr() {
    auto lhs = parse_term();
    while (ok_ && (peek_is(TokenKind::Operator, "+") || peek_is(TokenKind::Operator, "-"))) {
      char op = tokens_[pos_].text[0];
      ++pos_;
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Binary;
      node->op = op;
      node->lhs = std::move(lhs);
      node->rhs = parse_term();
      lhs = std::move(node);
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_term() {
    auto lhs = parse_factor();
    while (ok_ && (peek_is(TokenKind::Operator, "*") || peek_is(TokenKind::Operator, "/") ||
                   peek_is(TokenKind::Operator, "%"))) {
      char op = tokens_[pos_].text[0];
      ++pos_;
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Binary;
      node->op = op;
      node->lhs = std::move(lhs);
      node->rhs = parse_factor();
      lhs = std::move(node);
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_factor() {
    auto node = std::make_unique<Expr>();
    if (!ok_) return node;
    const Token* t = peek();
    if (t == nullptr) {
      fail(pos_);
      return node;
    }
    if (t->kind == TokenKind::Variable) {
      node->kind = Expr::Kind::Variable;
      node->var = t->text[0];
      ++pos_;
      return node;
    }
    if (t->kind == TokenKind::Integer) {
      node->kind = Expr::Kind::Literal;
      std::int64_t value = 0;
      std::from_chars(t->text.data(), t->text.data() + t->text.size(), value);
      node->literal = value;
      ++pos_;
      return node;
    }
    if (t->kind == TokenKind::Punct && t->text == "(") {
      ++pos_;
      node = parse_expr();
      expect(TokenKind::Punct, ")");
      return node;
    }
    fail(pos_);
    return node;
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
  bool ok_ = true;
  std::size_t error_offset_ = 0;
};

}  // namespace

std::variant<Program, ParseError> parse(std::span<const Token> tokens) {
  return Parser(tokens).run();
}

}  // namespace synthrl::minilang
