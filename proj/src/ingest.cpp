#include "orecast/ingest.hpp"

#include "orecast/error.hpp"
#include "orecast/text.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace orecast::ingest {

namespace {

constexpr int kMinYear = 1900;
constexpr std::size_t kFirstMonth = 8;
constexpr std::size_t kTotalColumn = 20;

enum class Cell { Gap, Value, Invalid };

struct Parsed {
	Cell kind = Cell::Gap;
	double value = 0.0;
};

bool is_gap_token(std::string_view s) {
	if (s.empty() || s == "-") {
		return true;
	}
	const std::string up = text::normalize_name(s);
	return up == "NA" || up == "N/A";
}

// "1,234,567.89": groups of three digits after the first.
bool has_thousands_groups(std::string_view s) {
	if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
		s.remove_prefix(1);
	}
	const auto dot = s.find('.');
	const std::string_view whole = s.substr(0, dot);
	if (dot != std::string_view::npos) {
		const auto frac = s.substr(dot + 1);
		if (!std::all_of(frac.begin(), frac.end(), [](char c) { return c >= '0' && c <= '9'; })) {
			return false;
		}
	}
	std::size_t group = 0;
	std::size_t groups = 0;
	for (std::size_t i = 0; i < whole.size(); ++i) {
		const char c = whole[i];
		if (c == ',') {
			if ((groups == 0 && (group < 1 || group > 3)) || (groups > 0 && group != 3)) {
				return false;
			}
			++groups;
			group = 0;
		} else if (c >= '0' && c <= '9') {
			++group;
		} else {
			return false;
		}
	}
	return groups > 0 && group == 3;
}

Parsed parse_quantity(std::string_view raw) {
	const auto s = text::trim(raw);
	if (is_gap_token(s)) {
		return {};
	}
	std::string buf(s);
	if (buf.find(',') != std::string::npos) {
		if (!has_thousands_groups(buf)) {
			return {Cell::Invalid, 0.0};
		}
		std::erase(buf, ',');
	}
	if (!buf.empty() && buf.front() == '+') {
		buf.erase(0, 1);
	}
	double v = 0.0;
	const auto res = std::from_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general);
	if (res.ec != std::errc{} || res.ptr != buf.data() + buf.size() || !std::isfinite(v) || v < 0.0) {
		return {Cell::Invalid, 0.0};
	}
	return {Cell::Value, v};
}

std::optional<int> parse_year(std::string_view raw, int max_year) {
	const auto s = text::trim(raw);
	int y = 0;
	const auto res = std::from_chars(s.data(), s.data() + s.size(), y);
	if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || y < kMinYear || y > max_year) {
		return std::nullopt;
	}
	return y;
}

int resolve_max_year(const FormatOptions &options) {
	if (options.max_year > 0) {
		return options.max_year;
	}
	const std::chrono::year_month_day today{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
	return static_cast<int>(today.year());
}

std::string_view strip_bom(std::string_view s) {
	if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") {
		s.remove_prefix(3);
	}
	return s;
}

std::vector<text::CsvRow> read_rows(std::string_view source, const FormatOptions &options) {
	if (const auto bad = text::find_invalid_utf8(source)) {
		throw EncodingError("input is not valid UTF-8 (byte offset " + std::to_string(*bad) + ")");
	}
	source = strip_bom(source);
	const char delim = options.delimiter.value_or(text::detect_delimiter(source));
	if (delim != ',' && delim != ';') {
		throw ParamError("delimiter must be ',' or ';'", "delimiter");
	}
	return text::parse_csv(source, delim);
}

const std::string &cell(const text::CsvRow &row, std::size_t i) {
	static const std::string empty;
	return i < row.fields.size() ? row.fields[i] : empty;
}

std::string month_label(std::size_t m) { return std::string(kMonthlyColumns[kFirstMonth + m]); }

} // namespace

bool ProductionRecord::has_gaps() const {
	return std::any_of(months.begin(), months.end(), [](const auto &m) { return !m.has_value(); });
}

double ProductionRecord::month_sum() const {
	double s = 0.0;
	for (const auto &m : months) {
		s += m.value_or(0.0);
	}
	return s;
}

void CleaningReport::merge(const CleaningReport &later) {
	rows_dropped += later.rows_dropped;
	names_corrected += later.names_corrected;
	values_imputed += later.values_imputed;
	messages.insert(messages.end(), later.messages.begin(), later.messages.end());
}

MonthlyData parse_monthly(std::string_view source, const FormatOptions &options) {
	const auto rows = read_rows(source, options);
	if (rows.empty()) {
		throw SchemaError("monthly table has no header row");
	}
	const int max_year = resolve_max_year(options);

	std::array<std::size_t, kMonthlyColumns.size()> index{};
	std::vector<std::string> missing;
	const auto &header = rows.front().fields;
	for (std::size_t c = 0; c < kMonthlyColumns.size(); ++c) {
		const std::string want = text::normalize_name(kMonthlyColumns[c]);
		const auto it = std::find_if(header.begin(), header.end(),
		                             [&](const std::string &h) { return text::normalize_name(h) == want; });
		if (it == header.end()) {
			missing.emplace_back(kMonthlyColumns[c]);
		} else {
			index[c] = static_cast<std::size_t>(it - header.begin());
		}
	}
	if (!missing.empty()) {
		std::string list;
		for (const auto &m : missing) {
			list += (list.empty() ? "" : ", ") + m;
		}
		throw SchemaError("monthly table is missing columns: " + list, missing.front());
	}

	MonthlyData out;
	auto &report = out.report;
	for (std::size_t r = 1; r < rows.size(); ++r) {
		const auto &row = rows[r];
		const std::size_t data_row = r;
		++report.rows_read;
		if (row.fields.size() != header.size()) {
			report.messages.push_back({data_row, "", "row has " + std::to_string(row.fields.size()) +
			                                             " fields, header has " + std::to_string(header.size())});
		}

		const auto year = parse_year(cell(row, index[7]), max_year);
		if (!year) {
			++report.rows_dropped;
			report.messages.push_back(
			    {data_row, std::string(kMonthlyColumns[7]), "dropped: unusable year '" + cell(row, index[7]) + "'"});
			continue;
		}

		ProductionRecord rec;
		rec.mineral = cell(row, index[0]);
		rec.unit = cell(row, index[1]);
		rec.stage = cell(row, index[2]);
		rec.process = cell(row, index[3]);
		rec.stratum = cell(row, index[4]);
		rec.holder = cell(row, index[5]);
		rec.department = cell(row, index[6]);
		rec.year = *year;
		rec.row = data_row;

		bool any = false;
		for (std::size_t m = 0; m < 12; ++m) {
			const auto &raw = cell(row, index[kFirstMonth + m]);
			const auto p = parse_quantity(raw);
			if (p.kind == Cell::Value) {
				rec.months[m] = p.value;
				any = true;
			} else if (p.kind == Cell::Invalid) {
				report.messages.push_back({data_row, month_label(m), "invalid quantity '" + raw + "' read as a gap"});
			}
		}
		if (!any) {
			++report.rows_dropped;
			report.messages.push_back({data_row, "", "dropped: every month is empty"});
			continue;
		}
		const auto &raw_total = cell(row, index[kTotalColumn]);
		const auto t = parse_quantity(raw_total);
		if (t.kind == Cell::Value) {
			rec.total = t.value;
		} else if (t.kind == Cell::Invalid) {
			report.messages.push_back({data_row, "Total", "invalid quantity '" + raw_total + "' read as a gap"});
		}
		out.records.push_back(std::move(rec));
	}
	return out;
}

const AnnualColumn &AnnualData::column(std::string_view mineral) const {
	const std::string key = text::normalize_name(mineral);
	for (const auto &c : columns) {
		if (c.mineral == key) {
			return c;
		}
	}
	throw SelectionError("no annual column for mineral '" + std::string(mineral) + "'", "mineral");
}

AnnualData parse_annual(std::string_view source, const FormatOptions &options) {
	const auto rows = read_rows(source, options);
	if (rows.empty()) {
		throw SchemaError("annual table has no header row", "AÑO");
	}
	const int max_year = resolve_max_year(options);
	const auto &header = rows.front().fields;

	AnnualData out;
	std::optional<std::size_t> year_col;
	std::vector<std::pair<std::size_t, std::string>> value_cols;
	for (std::size_t c = 0; c < header.size(); ++c) {
		const std::string name = text::normalize_name(header[c]);
		if (name.empty()) {
			continue;
		}
		if (name == "ANO") {
			year_col = c;
			continue;
		}
		AnnualColumn col;
		const auto open = name.find('(');
		const auto close = name.rfind(')');
		if (open != std::string::npos && close != std::string::npos && close > open) {
			col.mineral = text::normalize_name(std::string_view(name).substr(0, open));
			col.unit = text::normalize_name(std::string_view(name).substr(open + 1, close - open - 1));
		} else {
			col.mineral = name;
		}
		for (const auto &existing : out.columns) {
			if (existing.mineral == col.mineral) {
				throw SchemaError("annual table repeats mineral column " + col.mineral, header[c]);
			}
		}
		value_cols.emplace_back(c, col.mineral);
		out.columns.push_back(std::move(col));
	}
	if (!year_col) {
		throw SchemaError("annual table is missing column AÑO", "AÑO");
	}

	auto &report = out.report;
	std::set<int> seen;
	for (std::size_t r = 1; r < rows.size(); ++r) {
		const auto &row = rows[r];
		++report.rows_read;
		const auto year = parse_year(cell(row, *year_col), max_year);
		if (!year) {
			++report.rows_dropped;
			report.messages.push_back({r, "AÑO", "dropped: unusable year '" + cell(row, *year_col) + "'"});
			continue;
		}
		if (!seen.insert(*year).second) {
			throw DuplicateYearError("year " + std::to_string(*year) + " appears more than once", "AÑO");
		}
		AnnualRecord rec;
		rec.year = *year;
		for (const auto &[c, mineral] : value_cols) {
			const auto &raw = cell(row, c);
			const auto p = parse_quantity(raw);
			if (p.kind == Cell::Invalid) {
				report.messages.push_back({r, header[c], "invalid quantity '" + raw + "' read as a gap"});
			}
			rec.quantities[mineral] = p.kind == Cell::Value ? std::optional<double>(p.value) : std::nullopt;
		}
		out.records.push_back(std::move(rec));
	}
	std::sort(out.records.begin(), out.records.end(),
	          [](const AnnualRecord &a, const AnnualRecord &b) { return a.year < b.year; });
	return out;
}

MonthlyData normalize_names(std::vector<ProductionRecord> records) {
	MonthlyData out;
	out.report.rows_read = records.size();
	auto fix = [&](std::string &field, const ProductionRecord &rec, const char *column) {
		std::string norm = text::normalize_name(field);
		if (norm != field) {
			++out.report.names_corrected;
			out.report.messages.push_back({rec.row, column, "renamed '" + field + "' to '" + norm + "'"});
			field = std::move(norm);
		}
	};
	for (auto &rec : records) {
		fix(rec.mineral, rec, "Mineral");
		fix(rec.department, rec, "Departamento");
	}
	out.records = std::move(records);
	return out;
}

MonthlyData knn_impute(std::vector<ProductionRecord> records, int k) {
	if (k < 1) {
		throw KError("k must be at least 1, got " + std::to_string(k), "k");
	}
	MonthlyData out;
	out.report.rows_read = records.size();
	const std::size_t n = records.size();

	// Z-scores per month column within each mineral/unit group.
	std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
	for (std::size_t i = 0; i < n; ++i) {
		groups[{records[i].mineral, records[i].unit}].push_back(i);
	}
	std::vector<std::array<double, 12>> z(n);
	for (const auto &[key, members] : groups) {
		for (std::size_t m = 0; m < 12; ++m) {
			double sum = 0.0;
			std::size_t count = 0;
			for (std::size_t i : members) {
				if (records[i].months[m]) {
					sum += *records[i].months[m];
					++count;
				}
			}
			const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
			double ss = 0.0;
			for (std::size_t i : members) {
				if (records[i].months[m]) {
					const double d = *records[i].months[m] - mean;
					ss += d * d;
				}
			}
			const double sd = count > 0 ? std::sqrt(ss / static_cast<double>(count)) : 0.0;
			for (std::size_t i : members) {
				z[i][m] = (records[i].months[m] && sd > 0.0) ? (*records[i].months[m] - mean) / sd : 0.0;
			}
		}
	}

	std::vector<bool> drop(n, false);
	std::vector<std::array<std::optional<double>, 12>> filled(n);
	for (const auto &[key, members] : groups) {
		for (std::size_t i : members) {
			const auto &rec = records[i];
			for (std::size_t m = 0; m < 12 && !drop[i]; ++m) {
				if (rec.months[m]) {
					continue;
				}
				std::vector<std::pair<double, std::size_t>> cand;
				for (std::size_t j : members) {
					if (j == i || !records[j].months[m]) {
						continue;
					}
					double ss = 0.0;
					std::size_t shared = 0;
					for (std::size_t c = 0; c < 12; ++c) {
						if (rec.months[c] && records[j].months[c]) {
							const double d = z[i][c] - z[j][c];
							ss += d * d;
							++shared;
						}
					}
					if (shared > 0) {
						cand.emplace_back(std::sqrt(ss) / static_cast<double>(shared), j);
					}
				}
				if (cand.empty()) {
					drop[i] = true;
					out.report.messages.push_back(
					    {rec.row, month_label(m), "dropped: NoDonorError, no donor row for this gap"});
					break;
				}
				std::sort(cand.begin(), cand.end());
				const std::size_t use = std::min(cand.size(), static_cast<std::size_t>(k));
				double sum = 0.0;
				for (std::size_t t = 0; t < use; ++t) {
					sum += *records[cand[t].second].months[m];
				}
				filled[i][m] = sum / static_cast<double>(use);
			}
		}
	}

	for (std::size_t i = 0; i < n; ++i) {
		auto &rec = records[i];
		if (drop[i]) {
			++out.report.rows_dropped;
			continue;
		}
		for (std::size_t m = 0; m < 12; ++m) {
			if (!rec.months[m]) {
				rec.months[m] = filled[i][m];
				++out.report.values_imputed;
				out.report.messages.push_back(
				    {rec.row, month_label(m), "imputed " + text::format_double(*rec.months[m])});
			}
		}
		const double total = rec.month_sum();
		if (rec.total && std::abs(*rec.total - total) > 1e-6 * std::max(1.0, std::abs(total))) {
			out.report.messages.push_back({rec.row, "Total",
			                               "recomputed " + text::format_double(*rec.total) + " as " +
			                                   text::format_double(total)});
		}
		rec.total = total;
		out.records.push_back(std::move(rec));
	}
	return out;
}

TimeSeries to_series(const std::vector<ProductionRecord> &records, const Selector &selector, CleaningReport *log) {
	auto norm = [](const std::optional<std::string> &s) {
		return s ? std::optional<std::string>(text::normalize_name(*s)) : std::nullopt;
	};
	const auto mineral = norm(selector.mineral);
	const auto department = norm(selector.department);

	std::map<CalendarPoint, double> sums;
	std::set<std::string> units;
	bool matched = false;
	for (const auto &rec : records) {
		if (mineral && text::normalize_name(rec.mineral) != *mineral) {
			continue;
		}
		if (department && text::normalize_name(rec.department) != *department) {
			continue;
		}
		matched = true;
		units.insert(rec.unit);
		for (std::size_t m = 0; m < 12; ++m) {
			if (rec.months[m]) {
				sums[{rec.year, static_cast<int>(m) + 1}] += *rec.months[m];
			}
		}
	}
	std::string what = (mineral ? "mineral " + *mineral : std::string("all minerals")) +
	                   (department ? " in " + *department : std::string());
	if (!matched || sums.empty()) {
		throw EmptySelectionError("no production records match " + what);
	}
	if (units.size() > 1) {
		std::string list;
		for (const auto &u : units) {
			list += (list.empty() ? "" : ", ") + u;
		}
		throw MixedUnitError("selection for " + what + " mixes units: " + list, "mineral");
	}

	const CalendarPoint first = sums.begin()->first;
	const CalendarPoint last = sums.rbegin()->first;
	const long span = first.periods_until(last, Frequency::Monthly) + 1;
	std::vector<double> values(static_cast<std::size_t>(span), 0.0);
	for (long i = 0; i < span; ++i) {
		const CalendarPoint at = first.advance(i, Frequency::Monthly);
		const auto it = sums.find(at);
		if (it != sums.end()) {
			values[static_cast<std::size_t>(i)] = it->second;
		} else if (log) {
			char label[16];
			std::snprintf(label, sizeof label, "%04d-%02d", at.year, at.month);
			log->messages.push_back({0, label, "zero-filled: no record for this month"});
		}
	}
	return TimeSeries(std::move(values), first, Frequency::Monthly, *units.begin());
}

std::string write_monthly(const std::vector<ProductionRecord> &records, char delimiter) {
	std::ostringstream os;
	for (std::size_t c = 0; c < kMonthlyColumns.size(); ++c) {
		os << (c ? std::string(1, delimiter) : "") << text::csv_escape(kMonthlyColumns[c], delimiter);
	}
	os << '\n';
	auto number = [](const std::optional<double> &v) { return v ? text::format_double(*v) : std::string(); };
	for (const auto &rec : records) {
		for (const std::string *s : {&rec.mineral, &rec.unit, &rec.stage, &rec.process, &rec.stratum, &rec.holder,
		                             &rec.department}) {
			os << text::csv_escape(*s, delimiter) << delimiter;
		}
		os << rec.year;
		for (const auto &m : rec.months) {
			os << delimiter << number(m);
		}
		os << delimiter << number(rec.total) << '\n';
	}
	return os.str();
}

std::string read_file(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw IOError("cannot open " + path, "path");
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

} // namespace orecast::ingest
