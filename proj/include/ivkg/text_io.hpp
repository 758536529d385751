#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ivkg::io {

std::vector<std::string_view> split(std::string_view line, char sep);

// Strips a trailing '\r' (CRLF input).
std::string_view chomp(std::string_view line);

// Strict parses: the whole field must be consumed.
std::optional<unsigned long long> parse_uint(std::string_view s);
std::optional<long long> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double v);

// Minimal RFC 4180 CSV.
std::vector<std::string> parse_csv_record(std::string_view line);
// Reads one logical record (quoted fields may span lines). False at EOF.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no);
void write_csv_field(std::ostream& out, std::string_view field);
void write_csv_record(std::ostream& out, const std::vector<std::string>& fields);

std::string read_file(const std::string& path);

}  // namespace ivkg::io
