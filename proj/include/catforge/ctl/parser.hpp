#pragma once

#include <string_view>

#include "catforge/ctl/ast.hpp"

namespace catforge::ctl {

// Throws SyntaxError on any deviation from the grammar.
Program parse(std::string_view source);

}  // namespace catforge::ctl
