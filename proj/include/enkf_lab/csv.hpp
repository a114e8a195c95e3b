#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace enkf_lab {

/// Shortest text that is at least 17 significant digits, '.' decimal point,
/// independent of the C++ locale.
std::string format_number(double value);
double parse_number(std::string_view text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Comma separated, header first, LF line endings.
std::string render_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Writes through a temporary sibling file that is renamed into place, so a
/// failure never leaves a partial file at `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace enkf_lab
