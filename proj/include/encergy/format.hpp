#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace encergy {

// Shortest decimal string that parses back to the same double. Used for all
// machine-facing CSV/JSON payloads so files round-trip bit-exactly.
std::string format_full(double v);

// Human-facing output: 6 significant digits.
std::string format_sig6(double v);

// Strict numeric parsing (whole token must be consumed).
std::optional<double> try_parse_double(std::string_view s);
std::optional<long long> try_parse_int(std::string_view s);

} // namespace encergy
