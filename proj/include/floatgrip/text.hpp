#pragma once

// Small text helpers shared by the model-file, scenario and CSV formats.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace floatgrip {

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

/// Whole-string parse; nullopt on trailing garbage, empty input or overflow.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

/// A token with its 1-based column in the source line.
struct Token {
  std::string_view text;
  int column = 1;
};

/// Splits on whitespace after stripping a trailing `#` comment.
std::vector<Token> tokenize_line(std::string_view line);

std::vector<std::string_view> split(std::string_view text, char separator);

/// Splits text into lines, accepting \n and \r\n.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace floatgrip
