#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Small helpers shared by the line-oriented file formats.
namespace interlace::text {

struct Token {
    std::string_view text;
    int column = 1; // 1-based
};

// Splits a line on spaces/tabs, dropping anything after '#'.
std::vector<Token> tokenize(std::string_view line);

// "key=value" -> {key, value}; nullopt when there is no '='.
std::optional<std::pair<std::string_view, std::string_view>>
split_key_value(std::string_view token);

std::vector<std::string_view> split(std::string_view s, char delim);

long long parse_int(std::string_view s, int line, int column);
double parse_double(std::string_view s, int line, int column);

// Shortest representation that round-trips through parse_double.
std::string format_number(double value);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view content);

} // namespace interlace::text
