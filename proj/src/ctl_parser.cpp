#include "catforge/ctl/parser.hpp"

#include <array>
#include <limits>
#include <set>

#include "catforge/ctl/lexer.hpp"

namespace catforge::ctl {

bool is_builtin_name(std::string_view name) {
  static constexpr std::array<std::string_view, 7> names = {
      "len", "contains", "str", "abs", "round", "min", "max"};
  for (auto n : names) {
    if (n == name) return true;
  }
  return false;
}

namespace {

constexpr int kMaxDepth = 256;
constexpr std::uint64_t kInt64MaxMag = 9223372036854775807ULL;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program prog;
    while (peek().kind != TokKind::End) {
      prog.statements.push_back(parse_stmt());
    }
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t j = i_ + ahead;
    if (j >= toks_.size()) j = toks_.size() - 1;  // End token
    return toks_[j];
  }
  const Token& advance() { return toks_[i_ == toks_.size() - 1 ? i_ : i_++]; }

  [[noreturn]] void fail(const Token& tok, const std::string& detail) const {
    throw SyntaxError(tok.pos, detail);
  }

  const Token& expect(TokKind kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
    return advance();
  }

  std::string expect_ident(const char* what) {
    if (peek().kind != TokKind::Ident) fail(peek(), std::string("expected ") + what);
    return advance().text;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth) {
        throw SyntaxError(parser.peek().pos, "nesting too deep");
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  static ExprPtr make(SourcePos pos, auto node) {
    return std::make_shared<Expr>(Expr{pos, std::move(node)});
  }
  static StmtPtr make_stmt(SourcePos pos, auto node) {
    return std::make_shared<Stmt>(Stmt{pos, std::move(node)});
  }

  StmtPtr parse_stmt() {
    DepthGuard guard(*this);
    const Token& tok = peek();
    switch (tok.kind) {
      case TokKind::KwReturn: {
        advance();
        return make_stmt(tok.pos, ReturnStmt{parse_expr()});
      }
      case TokKind::KwIf: {
        advance();
        IfStmt node;
        node.cond = parse_expr();
        node.then_body = parse_block();
        if (peek().kind == TokKind::KwElse) {
          advance();
          node.has_else = true;
          node.else_body = parse_block();
        }
        return make_stmt(tok.pos, std::move(node));
      }
      case TokKind::KwFor: {
        advance();
        ForStmt node;
        node.var = expect_ident("loop variable");
        expect(TokKind::KwIn, "'in'");
        node.iterable = parse_expr();
        node.body = parse_block();
        return make_stmt(tok.pos, std::move(node));
      }
      case TokKind::Ident: {
        if (peek(1).kind == TokKind::Assign) {
          std::string name = advance().text;
          advance();  // '='
          return make_stmt(tok.pos, AssignStmt{std::move(name), parse_expr()});
        }
        return make_stmt(tok.pos, ExprStmt{parse_expr()});
      }
      default:
        return make_stmt(tok.pos, ExprStmt{parse_expr()});
    }
  }

  Block parse_block() {
    expect(TokKind::LBrace, "'{'");
    Block body;
    while (peek().kind != TokKind::RBrace) {
      if (peek().kind == TokKind::End) fail(peek(), "expected '}'");
      body.push_back(parse_stmt());
    }
    advance();
    return body;
  }

  ExprPtr parse_expr() {
    DepthGuard guard(*this);
    return parse_or();
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (peek().kind == TokKind::KwOr) {
      SourcePos pos = advance().pos;
      lhs = make(pos, BinExpr{BinOp::Or, lhs, parse_and()});
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (peek().kind == TokKind::KwAnd) {
      SourcePos pos = advance().pos;
      lhs = make(pos, BinExpr{BinOp::And, lhs, parse_not()});
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (peek().kind == TokKind::KwNot) {
      SourcePos pos = advance().pos;
      return make(pos, NotExpr{parse_cmp()});
    }
    return parse_cmp();
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    BinOp op;
    switch (peek().kind) {
      case TokKind::Eq: op = BinOp::Eq; break;
      case TokKind::Ne: op = BinOp::Ne; break;
      case TokKind::Lt: op = BinOp::Lt; break;
      case TokKind::Le: op = BinOp::Le; break;
      case TokKind::Gt: op = BinOp::Gt; break;
      case TokKind::Ge: op = BinOp::Ge; break;
      default: return lhs;
    }
    SourcePos pos = advance().pos;
    return make(pos, BinExpr{op, lhs, parse_add()});
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    for (;;) {
      TokKind k = peek().kind;
      if (k != TokKind::Plus && k != TokKind::Minus) return lhs;
      SourcePos pos = advance().pos;
      BinOp op = k == TokKind::Plus ? BinOp::Add : BinOp::Sub;
      lhs = make(pos, BinExpr{op, lhs, parse_mul()});
    }
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      TokKind k = peek().kind;
      if (k != TokKind::Star && k != TokKind::Slash) return lhs;
      SourcePos pos = advance().pos;
      BinOp op = k == TokKind::Star ? BinOp::Mul : BinOp::Div;
      lhs = make(pos, BinExpr{op, lhs, parse_unary()});
    }
  }

  ExprPtr parse_unary() {
    DepthGuard guard(*this);
    if (peek().kind != TokKind::Minus) return parse_postfix();
    SourcePos pos = advance().pos;
    // Fold a minus that sits directly on a bare numeric literal, so the full
    // Int range (including the most negative value) survives a round trip.
    TokKind next = peek().kind;
    TokKind after = peek(1).kind;
    bool suffixed = after == TokKind::LBracket || after == TokKind::Dot;
    if (next == TokKind::Int && !suffixed) {
      const Token& num = advance();
      if (num.int_value > kInt64MaxMag) {
        return make(pos, IntLit{std::numeric_limits<std::int64_t>::min()});
      }
      return make(pos, IntLit{-static_cast<std::int64_t>(num.int_value)});
    }
    if (next == TokKind::Float && !suffixed) {
      const Token& num = advance();
      return make(pos, FloatLit{-num.float_value});
    }
    return make(pos, UnaryNeg{parse_postfix()});
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_atom();
    for (;;) {
      if (peek().kind == TokKind::LBracket) {
        SourcePos pos = advance().pos;
        ExprPtr key = parse_expr();
        expect(TokKind::RBracket, "']'");
        e = make(pos, IndexExpr{e, key});
      } else if (peek().kind == TokKind::Dot) {
        SourcePos pos = advance().pos;
        std::string field = expect_ident("field name after '.'");
        e = make(pos, IndexExpr{e, make(pos, StrLit{std::move(field)})});
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_atom() {
    DepthGuard guard(*this);
    const Token& tok = peek();
    switch (tok.kind) {
      case TokKind::Int: {
        advance();
        if (tok.int_value > kInt64MaxMag) {
          fail(tok, "integer literal out of range: " + tok.text);
        }
        return make(tok.pos, IntLit{static_cast<std::int64_t>(tok.int_value)});
      }
      case TokKind::Float:
        advance();
        return make(tok.pos, FloatLit{tok.float_value});
      case TokKind::Str:
        advance();
        return make(tok.pos, StrLit{tok.str_value});
      case TokKind::KwTrue:
        advance();
        return make(tok.pos, BoolLit{true});
      case TokKind::KwFalse:
        advance();
        return make(tok.pos, BoolLit{false});
      case TokKind::KwNull:
        advance();
        return make(tok.pos, NullLit{});
      case TokKind::Ident: {
        if (peek(1).kind == TokKind::LParen) return parse_call();
        advance();
        return make(tok.pos, VarRef{tok.text});
      }
      case TokKind::LParen: {
        advance();
        ExprPtr e = parse_expr();
        expect(TokKind::RParen, "')'");
        return e;
      }
      case TokKind::LBracket:
        return parse_list();
      case TokKind::LBrace:
        return parse_map();
      default:
        fail(tok, "expected expression");
    }
  }

  ExprPtr parse_call() {
    const Token& name_tok = advance();
    CallExpr node;
    node.name = name_tok.text;
    node.builtin = is_builtin_name(node.name);
    advance();  // '('
    if (peek().kind != TokKind::RParen) {
      if (node.builtin) {
        node.args.push_back(parse_expr());
        while (peek().kind == TokKind::Comma) {
          advance();
          node.args.push_back(parse_expr());
        }
      } else {
        std::set<std::string> seen;
        for (;;) {
          if (peek().kind != TokKind::Ident || peek(1).kind != TokKind::Assign) {
            fail(peek(), "tool arguments must be keyword=value");
          }
          std::string key = advance().text;
          advance();  // '='
          if (!seen.insert(key).second) {
            fail(name_tok, "duplicate keyword argument '" + key + "'");
          }
          node.kwargs.emplace_back(std::move(key), parse_expr());
          if (peek().kind != TokKind::Comma) break;
          advance();
        }
      }
    }
    expect(TokKind::RParen, "')'");
    return make(name_tok.pos, std::move(node));
  }

  ExprPtr parse_list() {
    const Token& open = advance();
    ListLit node;
    if (peek().kind != TokKind::RBracket) {
      node.items.push_back(parse_expr());
      while (peek().kind == TokKind::Comma) {
        advance();
        node.items.push_back(parse_expr());
      }
    }
    expect(TokKind::RBracket, "']'");
    return make(open.pos, std::move(node));
  }

  ExprPtr parse_map() {
    const Token& open = advance();
    MapLit node;
    std::set<std::string> seen;
    if (peek().kind != TokKind::RBrace) {
      for (;;) {
        if (peek().kind != TokKind::Str) fail(peek(), "expected string key");
        std::string key = advance().str_value;
        if (!seen.insert(key).second) {
          fail(open, "duplicate map key \"" + key + "\"");
        }
        expect(TokKind::Colon, "':'");
        node.entries.emplace_back(std::move(key), parse_expr());
        if (peek().kind != TokKind::Comma) break;
        advance();
      }
    }
    expect(TokKind::RBrace, "'}'");
    return make(open.pos, std::move(node));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int depth_ = 0;
};

}  // namespace

Program parse(std::string_view source) { return Parser(lex(source)).run(); }

}  // namespace catforge::ctl
