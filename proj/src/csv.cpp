#include "lowrank/csv.hpp"

#include <cmath>
#include <cstdio>

namespace lowrank {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string format_number(long long value) { return std::to_string(value); }

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << fields[i];
  }
  out << '\n';
}

void write_summary_line(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& entries) {
  out << '#';
  for (const auto& [key, value] : entries) out << ' ' << key << '=' << value;
  out << '\n';
}

}  // namespace lowrank
