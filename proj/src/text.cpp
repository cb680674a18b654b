#include "orecast/text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>

namespace orecast::text {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

// ASCII base for U+00C0..U+00FF; 0 means no mapping.
constexpr std::array<char, 64> kLatin1 = {
    'A', 'A', 'A', 'A', 'A', 'A', 0,   'C', 'E', 'E', 'E', 'E', 'I', 'I', 'I', 'I', // C0-CF
    0,   'N', 'O', 'O', 'O', 'O', 'O', 0,   0,   'U', 'U', 'U', 'U', 'Y', 0,   0,   // D0-DF
    'a', 'a', 'a', 'a', 'a', 'a', 0,   'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i', // E0-EF
    0,   'n', 'o', 'o', 'o', 'o', 'o', 0,   0,   'u', 'u', 'u', 'u', 'y', 0,   'y', // F0-FF
};

} // namespace

std::optional<std::size_t> find_invalid_utf8(std::string_view s) {
	std::size_t i = 0;
	const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
	while (i < s.size()) {
		const unsigned char c = byte(i);
		std::size_t len = 0;
		std::uint32_t cp = 0;
		if (c < 0x80) {
			++i;
			continue;
		} else if ((c & 0xE0) == 0xC0) {
			len = 2;
			cp = c & 0x1F;
		} else if ((c & 0xF0) == 0xE0) {
			len = 3;
			cp = c & 0x0F;
		} else if ((c & 0xF8) == 0xF0) {
			len = 4;
			cp = c & 0x07;
		} else {
			return i;
		}
		if (i + len > s.size()) {
			return i;
		}
		for (std::size_t k = 1; k < len; ++k) {
			if ((byte(i + k) & 0xC0) != 0x80) {
				return i;
			}
			cp = (cp << 6) | (byte(i + k) & 0x3F);
		}
		const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
		if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
			return i;
		}
		i += len;
	}
	return std::nullopt;
}

std::string strip_accents(std::string_view s) {
	std::string out;
	out.reserve(s.size());
	for (std::size_t i = 0; i < s.size(); ++i) {
		const auto c = static_cast<unsigned char>(s[i]);
		if (c == 0xC3 && i + 1 < s.size()) {
			const auto next = static_cast<unsigned char>(s[i + 1]);
			if (next >= 0x80 && next <= 0xBF) {
				const char base = kLatin1[static_cast<std::size_t>(next - 0x80)];
				if (base != 0) {
					out.push_back(base);
					++i;
					continue;
				}
			}
		}
		out.push_back(s[i]);
	}
	return out;
}

std::string_view trim(std::string_view s) {
	while (!s.empty() && is_space(s.front())) {
		s.remove_prefix(1);
	}
	while (!s.empty() && is_space(s.back())) {
		s.remove_suffix(1);
	}
	return s;
}

std::string normalize_name(std::string_view s) {
	const std::string plain = strip_accents(trim(s));
	std::string out;
	out.reserve(plain.size());
	bool pending_space = false;
	for (char c : plain) {
		if (is_space(c)) {
			pending_space = true;
			continue;
		}
		if (pending_space && !out.empty()) {
			out.push_back(' ');
		}
		pending_space = false;
		out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
	}
	return out;
}

char detect_delimiter(std::string_view text) {
	std::size_t commas = 0;
	std::size_t semis = 0;
	bool in_quotes = false;
	for (char c : text) {
		if (c == '"') {
			in_quotes = !in_quotes;
		} else if (!in_quotes && (c == '\n' || c == '\r')) {
			break;
		} else if (!in_quotes && c == ',') {
			++commas;
		} else if (!in_quotes && c == ';') {
			++semis;
		}
	}
	return semis > commas ? ';' : ',';
}

std::vector<CsvRow> parse_csv(std::string_view text, char delimiter) {
	std::vector<CsvRow> rows;
	CsvRow row;
	std::string field;
	bool quoted = false;
	bool in_quotes = false;
	bool row_has_content = false;
	std::size_t line = 1;
	row.line = 1;

	auto end_field = [&] {
		row.fields.push_back(quoted ? field : std::string(trim(field)));
		row.quoted.push_back(quoted);
		field.clear();
		quoted = false;
	};
	auto end_row = [&] {
		end_field();
		if (row_has_content) {
			rows.push_back(std::move(row));
		}
		row = CsvRow{};
		row.line = line;
		row_has_content = false;
	};

	for (std::size_t i = 0; i < text.size(); ++i) {
		const char c = text[i];
		if (in_quotes) {
			if (c == '"') {
				if (i + 1 < text.size() && text[i + 1] == '"') {
					field.push_back('"');
					++i;
				} else {
					in_quotes = false;
				}
			} else {
				if (c == '\n') {
					++line;
				}
				field.push_back(c);
			}
			continue;
		}
		if (c == '"' && trim(field).empty()) {
			field.clear();
			in_quotes = true;
			quoted = true;
			row_has_content = true;
		} else if (c == delimiter) {
			end_field();
			row_has_content = true;
		} else if (c == '\r' || c == '\n') {
			if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
				++i;
			}
			++line;
			end_row();
		} else if (quoted && is_space(c)) {
			continue;
		} else {
			if (!is_space(c)) {
				row_has_content = true;
			}
			field.push_back(c);
		}
	}
	if (row_has_content || !field.empty()) {
		row_has_content = row_has_content || !trim(field).empty();
		end_row();
	}
	return rows;
}

std::string csv_escape(std::string_view field, char delimiter) {
	const bool needs = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos ||
	                   (!field.empty() && (is_space(field.front()) || is_space(field.back())));
	if (!needs) {
		return std::string(field);
	}
	std::string out = "\"";
	for (char c : field) {
		if (c == '"') {
			out.push_back('"');
		}
		out.push_back(c);
	}
	out.push_back('"');
	return out;
}

std::string format_double(double v) {
	std::array<char, 32> buf{};
	const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
	return std::string(buf.data(), res.ptr);
}

} // namespace orecast::text
