#pragma once

#include <string>
#include <vector>

namespace longtail {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Strict full-string parse; throws DataError (with `what` as context) on
// malformed or non-finite input.
double parse_double(const std::string& text, const std::string& context);

std::vector<std::string> split(const std::string& line, char sep);

std::string trim(const std::string& s);

// Writes content to path atomically (temp file in the same directory, then
// rename). Throws IoError on failure.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace longtail
