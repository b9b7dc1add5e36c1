#include "catforge/ctl/interpreter.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <optional>

namespace catforge::ctl {

namespace {

constexpr std::size_t kMaxLen = 65536;  // cap on Str bytes / List elements

[[noreturn]] void type_error(SourcePos pos, const std::string& detail) {
  throw RuntimeError(RunErrorKind::TypeMismatch, pos, detail);
}

[[noreturn]] void limit_error(SourcePos pos, const std::string& detail) {
  throw RuntimeError(RunErrorKind::LimitExceeded, pos, detail);
}

// Ordering for <, <=, >, >=, min, max: numbers with numbers, strings with
// strings. long double keeps all 64 int bits exact on x86-64.
int compare(const Value& a, const Value& b, SourcePos pos) {
  if (a.is_number() && b.is_number()) {
    if (a.is_int() && b.is_int()) {
      return a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int() ? 1 : 0;
    }
    long double x = a.is_int() ? static_cast<long double>(a.as_int())
                               : static_cast<long double>(a.as_float());
    long double y = b.is_int() ? static_cast<long double>(b.as_int())
                               : static_cast<long double>(b.as_float());
    return x < y ? -1 : x > y ? 1 : 0;
  }
  if (a.is_str() && b.is_str()) {
    int c = a.as_str().compare(b.as_str());
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  type_error(pos, std::string("cannot order ") + a.type_name() + " and " + b.type_name());
}

class Evaluator {
 public:
  Evaluator(ToolHandle* tools, const EvalLimits& limits) : tools_(tools), limits_(limits) {}

  EvalOutcome run(const Program& program, const Value::Map& bindings) {
    for (const auto& [name, value] : bindings) vars_[name] = value;
    std::optional<Value> returned;
    exec_block(program.statements, returned);
    EvalOutcome out;
    if (returned) {
      out.result = std::move(*returned);
    } else if (auto it = vars_.find("result"); it != vars_.end()) {
      out.result = it->second;
    }
    out.tool_trace = std::move(trace_);
    out.steps_used = steps_;
    return out;
  }

 private:
  void step(SourcePos pos) {
    if (++steps_ > limits_.max_steps) limit_error(pos, "step limit exceeded");
  }

  void check_size(const Value& v, SourcePos pos) {
    if (v.byte_size() > static_cast<std::size_t>(limits_.max_value_bytes)) {
      limit_error(pos, "value size limit exceeded");
    }
  }

  void exec_block(const Block& body, std::optional<Value>& returned) {
    for (const auto& s : body) {
      exec_stmt(*s, returned);
      if (returned) return;
    }
  }

  void exec_stmt(const Stmt& s, std::optional<Value>& returned) {
    step(s.pos);
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, AssignStmt>) {
            vars_[node.name] = eval(*node.value);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            eval(*node.expr);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            returned = eval(*node.value);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            if (require_bool(eval(*node.cond), node.cond->pos)) {
              exec_block(node.then_body, returned);
            } else if (node.has_else) {
              exec_block(node.else_body, returned);
            }
          } else if constexpr (std::is_same_v<T, ForStmt>) {
            Value iterable = eval(*node.iterable);
            if (!iterable.is_list()) {
              type_error(node.iterable->pos,
                         std::string("for expects a List, got ") + iterable.type_name());
            }
            // Iterate a copy so body writes cannot change the sequence.
            const Value::List items = iterable.as_list();
            for (const Value& item : items) {
              step(s.pos);
              vars_[node.var] = item;
              exec_block(node.body, returned);
              if (returned) return;
            }
          }
        },
        s.node);
  }

  bool require_bool(const Value& v, SourcePos pos) {
    if (!v.is_bool()) {
      type_error(pos, std::string("expected Bool, got ") + v.type_name());
    }
    return v.as_bool();
  }

  Value eval(const Expr& e) {
    step(e.pos);
    return std::visit([&](const auto& node) { return this->eval_node(e, node); }, e.node);
  }

  Value eval_node(const Expr&, const IntLit& n) { return Value(n.value); }
  Value eval_node(const Expr&, const FloatLit& n) { return Value(n.value); }
  Value eval_node(const Expr&, const StrLit& n) { return Value(n.value); }
  Value eval_node(const Expr&, const BoolLit& n) { return Value(n.value); }
  Value eval_node(const Expr&, const NullLit&) { return Value(); }

  Value eval_node(const Expr& e, const VarRef& n) {
    auto it = vars_.find(n.name);
    if (it == vars_.end()) {
      throw RuntimeError(RunErrorKind::KeyMissing, e.pos,
                         "undefined variable '" + n.name + "'");
    }
    return it->second;
  }

  Value eval_node(const Expr& e, const ListLit& n) {
    Value::List items;
    items.reserve(n.items.size());
    for (const auto& item : n.items) items.push_back(eval(*item));
    if (items.size() > kMaxLen) limit_error(e.pos, "list too long");
    Value v(std::move(items));
    check_size(v, e.pos);
    return v;
  }

  Value eval_node(const Expr& e, const MapLit& n) {
    Value::Map entries;
    for (const auto& [key, expr] : n.entries) entries[key] = eval(*expr);
    Value v(std::move(entries));
    check_size(v, e.pos);
    return v;
  }

  Value eval_node(const Expr& e, const UnaryNeg& n) {
    Value v = eval(*n.operand);
    if (v.is_int()) {
      if (v.as_int() == std::numeric_limits<std::int64_t>::min()) {
        limit_error(e.pos, "integer overflow");
      }
      return Value(-v.as_int());
    }
    if (v.is_float()) return Value(-v.as_float());
    type_error(e.pos, std::string("cannot negate ") + v.type_name());
  }

  Value eval_node(const Expr& e, const NotExpr& n) {
    return Value(!require_bool(eval(*n.operand), e.pos));
  }

  Value eval_node(const Expr& e, const BinExpr& n) {
    switch (n.op) {
      case BinOp::Or: {
        if (require_bool(eval(*n.lhs), n.lhs->pos)) return Value(true);
        return Value(require_bool(eval(*n.rhs), n.rhs->pos));
      }
      case BinOp::And: {
        if (!require_bool(eval(*n.lhs), n.lhs->pos)) return Value(false);
        return Value(require_bool(eval(*n.rhs), n.rhs->pos));
      }
      default: break;
    }
    Value a = eval(*n.lhs);
    Value b = eval(*n.rhs);
    switch (n.op) {
      case BinOp::Eq: return Value(a == b);
      case BinOp::Ne: return Value(a != b);
      case BinOp::Lt: return Value(compare(a, b, e.pos) < 0);
      case BinOp::Le: return Value(compare(a, b, e.pos) <= 0);
      case BinOp::Gt: return Value(compare(a, b, e.pos) > 0);
      case BinOp::Ge: return Value(compare(a, b, e.pos) >= 0);
      case BinOp::Add: return add(a, b, e.pos);
      case BinOp::Sub: return arith(a, b, e.pos, '-');
      case BinOp::Mul: return arith(a, b, e.pos, '*');
      case BinOp::Div: return divide(a, b, e.pos);
      default: break;
    }
    type_error(e.pos, "bad operator");
  }

  Value add(const Value& a, const Value& b, SourcePos pos) {
    if (a.is_str() && b.is_str()) {
      if (a.as_str().size() + b.as_str().size() > kMaxLen) {
        limit_error(pos, "string too long");
      }
      return Value(a.as_str() + b.as_str());
    }
    if (a.is_list() && b.is_list()) {
      if (a.as_list().size() + b.as_list().size() > kMaxLen) {
        limit_error(pos, "list too long");
      }
      Value::List out = a.as_list();
      out.insert(out.end(), b.as_list().begin(), b.as_list().end());
      Value v(std::move(out));
      check_size(v, pos);
      return v;
    }
    return arith(a, b, pos, '+');
  }

  Value arith(const Value& a, const Value& b, SourcePos pos, char op) {
    if (!a.is_number() || !b.is_number()) {
      type_error(pos, std::string("cannot apply '") + op + "' to " + a.type_name() +
                          " and " + b.type_name());
    }
    if (a.is_int() && b.is_int()) {
      std::int64_t r = 0;
      bool overflow = false;
      switch (op) {
        case '+': overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &r); break;
        case '-': overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &r); break;
        case '*': overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &r); break;
      }
      if (overflow) limit_error(pos, "integer overflow");
      return Value(r);
    }
    double x = a.number();
    double y = b.number();
    double r = op == '+' ? x + y : op == '-' ? x - y : x * y;
    if (!std::isfinite(r)) limit_error(pos, "float overflow");
    return Value(r);
  }

  Value divide(const Value& a, const Value& b, SourcePos pos) {
    if (!a.is_number() || !b.is_number()) {
      type_error(pos, std::string("cannot divide ") + a.type_name() + " by " + b.type_name());
    }
    double y = b.number();
    if (y == 0.0) {
      throw RuntimeError(RunErrorKind::DivByZero, pos, "division by zero");
    }
    double r = a.number() / y;
    if (!std::isfinite(r)) limit_error(pos, "float overflow");
    return Value(r);  // division always yields Float
  }

  Value eval_node(const Expr& e, const IndexExpr& n) {
    Value target = eval(*n.target);
    Value key = eval(*n.key);
    if (target.is_list() || target.is_str()) {
      if (!key.is_int()) {
        type_error(n.key->pos, std::string("index must be Int, got ") + key.type_name());
      }
      std::int64_t len = target.is_list()
                             ? static_cast<std::int64_t>(target.as_list().size())
                             : static_cast<std::int64_t>(target.as_str().size());
      std::int64_t idx = key.as_int();
      if (idx < 0) idx += len;
      if (idx < 0 || idx >= len) {
        throw RuntimeError(RunErrorKind::IndexOutOfRange, e.pos,
                           "index " + std::to_string(key.as_int()) + " out of range (len " +
                               std::to_string(len) + ")");
      }
      if (target.is_list()) return target.as_list()[static_cast<std::size_t>(idx)];
      return Value(std::string(1, target.as_str()[static_cast<std::size_t>(idx)]));
    }
    if (target.is_map()) {
      if (!key.is_str()) {
        type_error(n.key->pos, std::string("map key must be Str, got ") + key.type_name());
      }
      auto it = target.as_map().find(key.as_str());
      if (it == target.as_map().end()) {
        throw RuntimeError(RunErrorKind::KeyMissing, e.pos,
                           "key \"" + key.as_str() + "\" not found");
      }
      return it->second;
    }
    type_error(e.pos, std::string("cannot index ") + target.type_name());
  }

  Value eval_node(const Expr& e, const CallExpr& n) {
    if (n.builtin) return call_builtin(e, n);
    if (!tools_) {
      throw RuntimeError(RunErrorKind::UnknownTool, e.pos, "unknown tool '" + n.name + "'");
    }
    Value::Map args;
    for (const auto& [key, expr] : n.kwargs) args[key] = eval(*expr);
    // Checked after argument evaluation: arguments may contain tool calls.
    if (static_cast<std::int64_t>(trace_.size()) >= limits_.max_tool_calls) {
      limit_error(e.pos, "tool call limit exceeded");
    }
    Value args_value(args);
    check_size(args_value, e.pos);
    Value result = tools_->call(n.name, args, e.pos);
    check_size(result, e.pos);
    trace_.push_back({n.name, std::move(args_value), result});
    return result;
  }

  Value call_builtin(const Expr& e, const CallExpr& n) {
    std::vector<Value> args;
    args.reserve(n.args.size());
    for (const auto& a : n.args) args.push_back(eval(*a));
    auto want = [&](std::size_t count) {
      if (args.size() != count) {
        type_error(e.pos, n.name + " expects " + std::to_string(count) + " argument" +
                              (count == 1 ? "" : "s") + ", got " +
                              std::to_string(args.size()));
      }
    };
    if (n.name == "len") {
      want(1);
      const Value& v = args[0];
      if (v.is_str()) return Value(static_cast<std::int64_t>(v.as_str().size()));
      if (v.is_list()) return Value(static_cast<std::int64_t>(v.as_list().size()));
      if (v.is_map()) return Value(static_cast<std::int64_t>(v.as_map().size()));
      type_error(e.pos, std::string("len expects Str, List, or Map, got ") + v.type_name());
    }
    if (n.name == "contains") {
      want(2);
      const Value& hay = args[0];
      const Value& needle = args[1];
      if (hay.is_str()) {
        if (!needle.is_str()) {
          type_error(e.pos, std::string("contains on Str needs a Str, got ") +
                                needle.type_name());
        }
        return Value(hay.as_str().find(needle.as_str()) != std::string::npos);
      }
      if (hay.is_list()) {
        for (const Value& item : hay.as_list()) {
          if (item == needle) return Value(true);
        }
        return Value(false);
      }
      if (hay.is_map()) {
        if (!needle.is_str()) {
          type_error(e.pos, std::string("contains on Map needs a Str key, got ") +
                                needle.type_name());
        }
        return Value(hay.as_map().count(needle.as_str()) > 0);
      }
      type_error(e.pos, std::string("contains expects Str, List, or Map, got ") +
                            hay.type_name());
    }
    if (n.name == "str") {
      want(1);
      std::string text = args[0].is_str() ? args[0].as_str() : render(args[0]);
      if (text.size() > kMaxLen) limit_error(e.pos, "string too long");
      return Value(std::move(text));
    }
    if (n.name == "abs") {
      want(1);
      const Value& v = args[0];
      if (v.is_int()) {
        if (v.as_int() == std::numeric_limits<std::int64_t>::min()) {
          limit_error(e.pos, "integer overflow");
        }
        return Value(v.as_int() < 0 ? -v.as_int() : v.as_int());
      }
      if (v.is_float()) return Value(std::fabs(v.as_float()));
      type_error(e.pos, std::string("abs expects a number, got ") + v.type_name());
    }
    if (n.name == "round") {
      want(2);
      if (!args[1].is_int()) {
        type_error(e.pos, std::string("round ndigits must be Int, got ") +
                              args[1].type_name());
      }
      return round_value(args[0], args[1].as_int(), e.pos);
    }
    if (n.name == "min" || n.name == "max") {
      want(1);
      if (!args[0].is_list()) {
        type_error(e.pos, n.name + " expects a List, got " +
                              std::string(args[0].type_name()));
      }
      const Value::List& items = args[0].as_list();
      if (items.empty()) type_error(e.pos, n.name + " of empty list");
      std::size_t best = 0;
      bool want_max = n.name == "max";
      for (std::size_t k = 1; k < items.size(); ++k) {
        int c = compare(items[k], items[best], e.pos);
        // Strict inequality keeps the first occurrence on ties.
        if (want_max ? c > 0 : c < 0) best = k;
      }
      return items[best];
    }
    type_error(e.pos, "unhandled builtin " + n.name);
  }

  Value round_value(const Value& v, std::int64_t ndigits, SourcePos pos) {
    if (v.is_int()) {
      if (ndigits >= 0) return v;
      if (ndigits < -18) return Value(std::int64_t{0});
      __int128 pow10 = 1;
      for (std::int64_t k = 0; k < -ndigits; ++k) pow10 *= 10;
      __int128 x = v.as_int();
      __int128 q = x / pow10;
      __int128 rem = x % pow10;
      // Half away from zero.
      if (rem * 2 >= pow10) q += 1;
      if (rem * 2 <= -pow10) q -= 1;
      __int128 r = q * pow10;
      if (r > std::numeric_limits<std::int64_t>::max() ||
          r < std::numeric_limits<std::int64_t>::min()) {
        limit_error(pos, "integer overflow");
      }
      return Value(static_cast<std::int64_t>(r));
    }
    if (v.is_float()) {
      if (ndigits < -308 || ndigits > 308) {
        type_error(pos, "round ndigits out of range");
      }
      double scale = std::pow(10.0, static_cast<double>(ndigits));
      double r = std::round(v.as_float() * scale) / scale;
      if (!std::isfinite(r)) limit_error(pos, "float overflow");
      return Value(r);
    }
    type_error(pos, std::string("round expects a number, got ") + v.type_name());
  }

  ToolHandle* tools_;
  const EvalLimits& limits_;
  std::map<std::string, Value> vars_;
  std::vector<ToolCallRecord> trace_;
  std::int64_t steps_ = 0;
};

}  // namespace

EvalOutcome evaluate(const Program& program, ToolHandle* tools, const EvalLimits& limits,
                     const Value::Map& bindings) {
  return Evaluator(tools, limits).run(program, bindings);
}

bool coerce_bool(const Value& v) {
  if (!v.is_bool()) {
    throw RuntimeError(RunErrorKind::TypeMismatch, {0, 0},
                       std::string("verdict must be Bool, got ") + v.type_name());
  }
  return v.as_bool();
}

}  // namespace catforge::ctl
