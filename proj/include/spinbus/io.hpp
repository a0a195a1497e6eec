#pragma once
#include <filesystem>
#include <string>
#include <vector>

namespace spinbus {

// Locale-independent float formatting, 12 significant digits.
std::string format_double(double x);

// One CSV row from doubles (12 significant digits each).
std::string csv_row(const std::vector<double>& values);

void write_text_file(const std::filesystem::path& path, const std::string& body);

// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

} // namespace spinbus
