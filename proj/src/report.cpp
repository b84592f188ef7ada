#include "uucc/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace uucc {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  // Shortest %g form that reads back to the same double.
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

void write_kv(std::ostream& out, std::string_view key, double value) { out << key << '=' << format_real(value) << '\n'; }

void write_kv(std::ostream& out, std::string_view key, std::string_view value) { out << key << '=' << value << '\n'; }

void write_kv(std::ostream& out, std::string_view key, std::size_t value) { out << key << '=' << value << '\n'; }

void write_kv(std::ostream& out, std::string_view key, const std::optional<std::size_t>& value) {
  if (value) {
    write_kv(out, key, *value);
  } else {
    write_kv(out, key, std::string_view("none"));
  }
}

}  // namespace uucc
