#pragma once

#include <string>
#include <vector>

namespace c2c {

// RFC 4180: fields holding comma, quote or newline get quoted, quotes double.
std::string csv_field(const std::string& s);
std::string csv_line(const std::vector<std::string>& fields);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Fixed float formatting used in every CSV this package writes.
std::string csv_float(double v);

}  // namespace c2c
