#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orecast::text {

/// Byte offset of the first invalid UTF-8 sequence, or nullopt.
std::optional<std::size_t> find_invalid_utf8(std::string_view s);

/// Replaces accented Latin letters (Á, é, ñ, ü, ...) with their ASCII base.
std::string strip_accents(std::string_view s);

std::string_view trim(std::string_view s);

/// Uppercase, accents stripped, trimmed, internal whitespace collapsed.
std::string normalize_name(std::string_view s);

/// One parsed CSV line. `quoted[i]` tells whether field i was quoted.
struct CsvRow {
	std::vector<std::string> fields;
	std::vector<bool> quoted;
	/// 1-based line number where the row starts.
	std::size_t line = 0;
};

/// Picks ';' when the first line has more semicolons than commas
/// outside quotes, otherwise ','.
char detect_delimiter(std::string_view text);

/// RFC 4180 style: double quotes enclose fields, "" escapes a quote,
/// quoted fields may span lines. Blank lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view text, char delimiter);

/// Quotes `field` when it contains the delimiter, a quote or a line break.
std::string csv_escape(std::string_view field, char delimiter);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

} // namespace orecast::text
