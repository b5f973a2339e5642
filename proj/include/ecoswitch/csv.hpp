#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ecoswitch::csv {

/// Shortest decimal text that round-trips to the same double.
std::string num(double value);

std::vector<std::string> split(std::string_view line);

double parse_double(std::string_view field, const std::string& path, std::size_t line);
std::int64_t parse_int(std::string_view field, const std::string& path, std::size_t line);

/// Opens `path` for writing, creating parent directories. Throws IoError with the path.
std::ofstream open_output(const std::filesystem::path& path);

/// Opens `path` for reading. Throws IoError with the path.
std::ifstream open_input(const std::filesystem::path& path);

/// Reads all lines, stripping a trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace ecoswitch::csv
