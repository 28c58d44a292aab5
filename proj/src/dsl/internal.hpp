#pragma once

#include <string_view>

#include "fulfil/dsl/ast.hpp"

namespace fulfil::dsl {

/// Parses the expression inside an interpolation hole; positions in errors
/// are relative to (line, column).
ExprPtr parse_hole(std::string_view text, int line, int column);

}  // namespace fulfil::dsl
