#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace autospmv {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Whole-token parse; accepts a leading '+'. Returns nullopt on junk.
std::optional<double> parse_double(std::string_view token);
std::optional<std::int64_t> parse_int(std::string_view token);

}  // namespace autospmv
