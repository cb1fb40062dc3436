#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ndasnr::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kRuntimeFailure = 2,
};

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parses a value list: comma-separated numbers, inclusive "start:step:stop"
/// ranges, and "a,b,...,z" progressions (arithmetic or geometric, inferred from
/// the two items before the ellipsis). Throws UsageError on malformed input.
std::vector<double> parse_value_list(std::string_view text);

/// Same syntax, every value must be a positive integer.
std::vector<std::size_t> parse_count_list(std::string_view text);

/// Entry point shared by the executable and the tests; args exclude argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ndasnr::cli
