#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kgext::text {

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD so that
/// similarity metrics stay total on arbitrary input.
std::u32string decode_utf8(std::string_view s);

std::string to_lower_ascii(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::vector<std::string> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Strict parse of a whole string as a double; throws FormatError.
double parse_double(std::string_view s);

long long parse_int(std::string_view s);

/// Local name of an IRI: the part after the last '#', '/' or ':'.
std::string local_name(std::string_view iri);

// RFC 4180 style CSV helpers.
std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);
std::vector<std::string> csv_parse_line(std::string_view line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a as 16 lowercase hex digits, used to fingerprint artifacts.
std::string fnv1a64_hex(std::string_view data);

/// Splits into lines, dropping a trailing '\r' on each.
std::vector<std::string> lines(std::string_view contents);

}  // namespace kgext::text
