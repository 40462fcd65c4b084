#pragma once

#include <string>
#include <vector>

#include "escher/schema.hpp"
#include "internal/lexer.hpp"

namespace escher::detail {

// With generic_params == nullptr every generic-parameter token is accepted
// as a parameter reference (object files carry no class header).
TypePtr parse_type_expr(TokenCursor& cursor, const std::vector<std::string>* generic_params);

}  // namespace escher::detail
