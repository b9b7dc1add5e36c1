#pragma once

#include <string>

#include "catforge/ctl/ast.hpp"

namespace catforge::ctl {

// Canonical source form: 2-space indents, one statement per line, minimal
// parentheses, `a.b` desugared to a["b"]. Reparsing the output yields an
// AST that prints identically.
std::string pretty_print(const Program& program);
std::string pretty_print_expr(const Expr& expr);

}  // namespace catforge::ctl
