#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lowrank {

// Round-trip formatting with 17 significant digits; non-finite values print
// as nan, inf or -inf.
std::string format_number(double value);
std::string format_number(long long value);

// Writes fields joined by ',' and terminated by '\n'.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Writes "# key=value key=value ..." as one line.
void write_summary_line(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace lowrank
