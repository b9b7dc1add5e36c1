#include "catforge/ctl/printer.hpp"

#include <cmath>

#include "catforge/ctl/value.hpp"

namespace catforge::ctl {

namespace {

// Matches grammar levels: or < and < not < cmp < add < mul < neg < postfix.
enum Prec {
  kOr = 1,
  kAnd = 2,
  kNot = 3,
  kCmp = 4,
  kAdd = 5,
  kMul = 6,
  kNeg = 7,
  kPostfix = 8,
  kAtom = 9,
};

int op_prec(BinOp op) {
  switch (op) {
    case BinOp::Or: return kOr;
    case BinOp::And: return kAnd;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return kCmp;
    case BinOp::Add:
    case BinOp::Sub: return kAdd;
    case BinOp::Mul:
    case BinOp::Div: return kMul;
  }
  return kAtom;
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Or: return "or";
    case BinOp::And: return "and";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
  }
  return "?";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

struct Printer {
  std::string out;

  // A negative literal prints with its sign and so parses as a unary; give
  // it unary precedence so `(-3)[0]` keeps its parentheses.
  int prec_of(const Expr& e) const {
    return std::visit(
        [](const auto& node) -> int {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return node.value < 0 ? kNeg : kAtom;
          } else if constexpr (std::is_same_v<T, FloatLit>) {
            return std::signbit(node.value) ? kNeg : kAtom;
          } else if constexpr (std::is_same_v<T, UnaryNeg>) {
            return kNeg;
          } else if constexpr (std::is_same_v<T, NotExpr>) {
            return kNot;
          } else if constexpr (std::is_same_v<T, BinExpr>) {
            return op_prec(node.op);
          } else if constexpr (std::is_same_v<T, IndexExpr>) {
            return kPostfix;
          } else {
            return kAtom;
          }
        },
        e.node);
  }

  void expr(const Expr& e, int min_prec) {
    bool wrap = prec_of(e) < min_prec;
    if (wrap) out += '(';
    std::visit([&](const auto& node) { this->node(e, node); }, e.node);
    if (wrap) out += ')';
  }

  void node(const Expr&, const IntLit& n) { out += std::to_string(n.value); }
  void node(const Expr&, const FloatLit& n) { out += float_repr(n.value); }
  void node(const Expr&, const StrLit& n) { out += quote(n.value); }
  void node(const Expr&, const BoolLit& n) { out += n.value ? "true" : "false"; }
  void node(const Expr&, const NullLit&) { out += "null"; }
  void node(const Expr&, const VarRef& n) { out += n.name; }

  void node(const Expr&, const ListLit& n) {
    out += '[';
    for (std::size_t k = 0; k < n.items.size(); ++k) {
      if (k) out += ", ";
      expr(*n.items[k], 0);
    }
    out += ']';
  }

  void node(const Expr&, const MapLit& n) {
    out += '{';
    for (std::size_t k = 0; k < n.entries.size(); ++k) {
      if (k) out += ", ";
      out += quote(n.entries[k].first);
      out += ": ";
      expr(*n.entries[k].second, 0);
    }
    out += '}';
  }

  void node(const Expr&, const UnaryNeg& n) {
    out += '-';
    expr(*n.operand, kPostfix);
  }

  void node(const Expr&, const NotExpr& n) {
    out += "not ";
    expr(*n.operand, kCmp);
  }

  void node(const Expr&, const BinExpr& n) {
    int p = op_prec(n.op);
    // Comparisons are non-associative; both sides sit at add level.
    int left_min = p == kCmp ? kAdd : p;
    int right_min = p == kCmp ? kAdd : p + 1;
    expr(*n.lhs, left_min);
    out += ' ';
    out += op_text(n.op);
    out += ' ';
    expr(*n.rhs, right_min);
  }

  void node(const Expr&, const IndexExpr& n) {
    expr(*n.target, kPostfix);
    out += '[';
    expr(*n.key, 0);
    out += ']';
  }

  void node(const Expr&, const CallExpr& n) {
    out += n.name;
    out += '(';
    if (n.builtin) {
      for (std::size_t k = 0; k < n.args.size(); ++k) {
        if (k) out += ", ";
        expr(*n.args[k], 0);
      }
    } else {
      for (std::size_t k = 0; k < n.kwargs.size(); ++k) {
        if (k) out += ", ";
        out += n.kwargs[k].first;
        out += '=';
        expr(*n.kwargs[k].second, 0);
      }
    }
    out += ')';
  }

  void indent(int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

  void block(const Block& body, int depth) {
    out += "{\n";
    for (const auto& s : body) stmt(*s, depth + 1);
    indent(depth);
    out += '}';
  }

  void stmt(const Stmt& s, int depth) {
    indent(depth);
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<std::remove_cvref_t<decltype(node)>>;
          if constexpr (std::is_same_v<T, AssignStmt>) {
            out += node.name;
            out += " = ";
            expr(*node.value, 0);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(*node.expr, 0);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            out += "return ";
            expr(*node.value, 0);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            out += "if ";
            expr(*node.cond, 0);
            out += ' ';
            block(node.then_body, depth);
            if (node.has_else) {
              out += " else ";
              block(node.else_body, depth);
            }
          } else if constexpr (std::is_same_v<T, ForStmt>) {
            out += "for ";
            out += node.var;
            out += " in ";
            expr(*node.iterable, 0);
            out += ' ';
            block(node.body, depth);
          }
        },
        s.node);
    out += '\n';
  }
};

}  // namespace

std::string pretty_print(const Program& program) {
  Printer p;
  for (const auto& s : program.statements) p.stmt(*s, 0);
  return p.out;
}

std::string pretty_print_expr(const Expr& expr) {
  Printer p;
  p.expr(expr, 0);
  return p.out;
}

}  // namespace catforge::ctl
