#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace etdlab::text {

/// %.17g: enough digits for an exact round trip through parse_double.
std::string format_double(double v);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string> split(std::string_view s, char sep);

/// Whole-string parses; false on any trailing or missing characters.
bool parse_double(std::string_view s, double& out) noexcept;
bool parse_u64(std::string_view s, std::uint64_t& out) noexcept;

}  // namespace etdlab::text
