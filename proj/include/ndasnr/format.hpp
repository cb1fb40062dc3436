#pragma once

#include <string>
#include <string_view>

namespace ndasnr {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Parses the whole of `text` as a double (leading '+' accepted).
/// Returns false on trailing garbage or an empty string.
bool parse_double(std::string_view text, double& value);

}  // namespace ndasnr
