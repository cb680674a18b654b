#pragma once

#include "orecast/series.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orecast::ingest {

/// Header of the monthly production table, in file order.
inline constexpr std::array<std::string_view, 21> kMonthlyColumns = {
    "Mineral", "Unidad de medida", "Etapa",  "Proceso", "Estrato",   "Titular", "Departamento",
    "Año",     "Enero",            "Febrero", "Marzo",  "Abril",     "Mayo",    "Junio",
    "Julio",   "Agosto",           "Septiembre", "Octubre", "Noviembre", "Diciembre", "Total"};

struct ProductionRecord {
	std::string mineral;
	std::string unit;
	std::string stage;
	std::string process;
	std::string stratum;
	std::string holder;
	std::string department;
	int year = 0;
	/// January..December; nullopt is a gap.
	std::array<std::optional<double>, 12> months{};
	std::optional<double> total;
	/// 1-based data row in the source file.
	std::size_t row = 0;

	bool has_gaps() const;
	double month_sum() const;

	bool operator==(const ProductionRecord &) const = default;
};

struct Notice {
	std::size_t row = 0;
	std::string column;
	std::string action;
};

struct CleaningReport {
	std::size_t rows_read = 0;
	std::size_t rows_dropped = 0;
	std::size_t names_corrected = 0;
	std::size_t values_imputed = 0;
	std::vector<Notice> messages;

	std::size_t rows_kept() const { return rows_read - rows_dropped; }
	/// Adds counters and notices from a later cleaning stage. Rows read
	/// are taken from the first stage only.
	void merge(const CleaningReport &later);
};

struct FormatOptions {
	/// ',' or ';'. Detected from the header when unset.
	std::optional<char> delimiter;
	/// Latest accepted year; 0 means the current calendar year.
	int max_year = 0;
};

struct MonthlyData {
	std::vector<ProductionRecord> records;
	CleaningReport report;
};

/// Parses the 21-column monthly table. Header names match regardless of
/// case, accents and spacing. Rows with an unusable year or with every
/// month empty are dropped and logged.
MonthlyData parse_monthly(std::string_view source, const FormatOptions &options = {});

struct AnnualColumn {
	std::string mineral;
	std::string unit;
};

struct AnnualRecord {
	int year = 0;
	std::map<std::string, std::optional<double>> quantities;
};

struct AnnualData {
	std::vector<AnnualColumn> columns;
	/// Sorted by year, strictly increasing.
	std::vector<AnnualRecord> records;
	CleaningReport report;

	/// Throws SelectionError for an unknown mineral.
	const AnnualColumn &column(std::string_view mineral) const;
};

/// Parses the annual table: AÑO plus MINERAL(UNIT) columns.
AnnualData parse_annual(std::string_view source, const FormatOptions &options = {});

/// Normalizes mineral and department names (see text::normalize_name).
MonthlyData normalize_names(std::vector<ProductionRecord> records);

/// Fills every month gap with the mean of its k nearest donors and
/// recomputes totals. Donors share mineral and unit and have the month
/// observed. Distance is the Euclidean distance over the z-scored months
/// observed in both rows, divided by the number of such months. Rows
/// with a gap that has no donor are dropped and logged.
MonthlyData knn_impute(std::vector<ProductionRecord> records, int k = 5);

struct Selector {
	std::optional<std::string> mineral;
	std::optional<std::string> department;
};

/// Monthly series summing matched records per calendar month. Months
/// inside the span with no observed value are zero-filled; each one is
/// noted in `log` when given.
TimeSeries to_series(const std::vector<ProductionRecord> &records, const Selector &selector,
                     CleaningReport *log = nullptr);

/// Writes records in the monthly table format, canonical header.
std::string write_monthly(const std::vector<ProductionRecord> &records, char delimiter = ',');

/// Reads a whole file; throws IOError when it cannot be opened.
std::string read_file(const std::string &path);

} // namespace orecast::ingest
