#ifndef FOLK_TEXT_HPP
#define FOLK_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace folk {

std::string trim(std::string_view s);

// Collapses runs of whitespace to a single space and trims both ends.
std::string normalize_ws(std::string_view s);

std::string to_lower(std::string_view s);

// Splits on '\n'; a trailing newline does not produce an empty final line.
// '\r' before a split point is dropped.
std::vector<std::string> split_lines(std::string_view s);

// CRLF -> LF and trailing spaces/tabs stripped from every line. Applied to
// raw LLM completions before any parsing.
std::string normalize_completion(std::string_view s);

// Truncates to at most max_chars, backing up to the previous word boundary
// when one exists past the halfway point.
std::string truncate_at_word(std::string_view s, std::size_t max_chars);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string url_encode(std::string_view s);

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace folk

#endif  // FOLK_TEXT_HPP
