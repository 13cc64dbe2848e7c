#pragma once

#include <string>
#include <string_view>

namespace hjb {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Strict parse of a full string as a double; throws InputError otherwise.
double parse_double(std::string_view text);

}  // namespace hjb
