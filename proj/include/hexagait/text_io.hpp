#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hexagait {

/// Malformed text input. The message names the offending field or line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Whole-string parse; throws ParseError mentioning `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::vector<std::string_view> split_fields(std::string_view line, char sep);
std::vector<std::string_view> split_whitespace(std::string_view line);
std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place, so readers
/// never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace hexagait
