#ifndef PEDFLOW_TEXT_HPP
#define PEDFLOW_TEXT_HPP

// Small string helpers shared by the CSV and config readers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pedflow::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

/// Shortest decimal form that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace pedflow::text

#endif  // PEDFLOW_TEXT_HPP
