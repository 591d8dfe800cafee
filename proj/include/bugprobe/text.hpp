#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bugprobe {

// Splits on '\n' and drops a trailing '\r'. A final empty line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);

// Removes a '#' comment and surrounding whitespace.
std::string_view strip_comment(std::string_view line);

// Throws MissingAsset when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace bugprobe
