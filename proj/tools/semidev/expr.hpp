#pragma once

#include <map>
#include <string>

namespace semidev::cli {

// Arithmetic for numeric flags: numbers, + - * /, parentheses, and named
// parameters, so boundary values like "1/(1+eps)" resolve exactly from the
// same eps the run uses.
double eval_expr(const std::string& text,
                 const std::map<std::string, double>& vars);

}  // namespace semidev::cli
