#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "catforge/ctl/errors.hpp"

namespace catforge::ctl {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct IntLit { std::int64_t value; };
struct FloatLit { double value; };
struct StrLit { std::string value; };
struct BoolLit { bool value; };
struct NullLit {};
struct VarRef { std::string name; };
struct ListLit { std::vector<ExprPtr> items; };
// Entries keep source order; duplicates are rejected at parse time.
struct MapLit { std::vector<std::pair<std::string, ExprPtr>> entries; };
struct UnaryNeg { ExprPtr operand; };
struct NotExpr { ExprPtr operand; };

enum class BinOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };

struct BinExpr { BinOp op; ExprPtr lhs; ExprPtr rhs; };
// `a.b` is parsed straight to IndexExpr{a, StrLit "b"}.
struct IndexExpr { ExprPtr target; ExprPtr key; };
// Builtins take positional args; everything else is a tool call with
// keyword args only. Exactly one of the two vectors is populated.
struct CallExpr {
  std::string name;
  bool builtin = false;
  std::vector<ExprPtr> args;
  std::vector<std::pair<std::string, ExprPtr>> kwargs;
};

struct Expr {
  SourcePos pos;
  std::variant<IntLit, FloatLit, StrLit, BoolLit, NullLit, VarRef, ListLit,
               MapLit, UnaryNeg, NotExpr, BinExpr, IndexExpr, CallExpr>
      node;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct AssignStmt { std::string name; ExprPtr value; };
struct ExprStmt { ExprPtr expr; };
struct IfStmt { ExprPtr cond; Block then_body; Block else_body; bool has_else = false; };
struct ForStmt { std::string var; ExprPtr iterable; Block body; };
struct ReturnStmt { ExprPtr value; };

struct Stmt {
  SourcePos pos;
  std::variant<AssignStmt, ExprStmt, IfStmt, ForStmt, ReturnStmt> node;
};

struct Program {
  Block statements;
};

bool is_builtin_name(std::string_view name);

}  // namespace catforge::ctl
