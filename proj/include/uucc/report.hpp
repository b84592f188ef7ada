#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace uucc {

/// Shortest %g text (15 to 17 digits) that round-trips a double; "nan"/"inf" for non-finite values.
std::string format_real(double value);

/// Writes one `key=value` line.
void write_kv(std::ostream& out, std::string_view key, double value);
void write_kv(std::ostream& out, std::string_view key, std::string_view value);
void write_kv(std::ostream& out, std::string_view key, std::size_t value);
/// Writes "none" for an empty optional.
void write_kv(std::ostream& out, std::string_view key, const std::optional<std::size_t>& value);

}  // namespace uucc
