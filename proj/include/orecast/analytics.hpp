#pragma once

#include "orecast/ingest.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orecast::analytics {

/// The 25 first-level regions (24 departments plus Callao), normalized.
inline constexpr std::array<std::string_view, 25> kDepartments = {
    "AMAZONAS", "ANCASH",   "APURIMAC", "AREQUIPA", "AYACUCHO",      "CAJAMARCA", "CALLAO",
    "CUSCO",    "HUANCAVELICA", "HUANUCO", "ICA",   "JUNIN",         "LA LIBERTAD", "LAMBAYEQUE",
    "LIMA",     "LORETO",   "MADRE DE DIOS", "MOQUEGUA", "PASCO",    "PIURA",     "PUNO",
    "SAN MARTIN", "TACNA",  "TUMBES",   "UCAYALI"};

enum class ChartKind { Bar, Pie, FrequencyPolygon };
enum class GroupBy { Mineral, Department, Year, Stratum, Stage };

std::string to_string(ChartKind kind);
std::string to_string(GroupBy g);
/// Throws ParamError (field "group_by") for an unknown name.
GroupBy parse_group_by(std::string_view name);

struct ChartSeries {
	ChartKind kind = ChartKind::Bar;
	std::vector<std::string> labels;
	std::vector<double> values;
	/// Numeric x positions (bin midpoints) for frequency polygons.
	std::vector<double> x;
	std::string unit;
	std::string title;
};

struct MineralTotal {
	std::string mineral;
	std::string unit;
	double quantity = 0.0;
};

struct DepartmentStats {
	std::string department;
	/// Sorted by mineral, then unit.
	std::vector<MineralTotal> total_by_mineral;
	/// Largest mineral within each unit.
	std::map<std::string, std::string> top_by_unit;
	/// Top mineral of the unit with the most records (ties: unit name).
	std::string top_mineral;
	std::size_t record_count = 0;
	int year_min = 0;
	int year_max = 0;
};

/// Records whose mineral and department match the selector after name
/// normalization.
std::vector<ingest::ProductionRecord> filter(const std::vector<ingest::ProductionRecord> &records,
                                             const ingest::Selector &selector);

/// Record total, or the sum of its months when the total is missing.
double record_total(const ingest::ProductionRecord &r);

/// Bar series of summed totals, one series per unit, each sorted by
/// descending value (ties by label). Series are ordered by unit.
std::vector<ChartSeries> aggregate(const std::vector<ingest::ProductionRecord> &records, GroupBy group_by);

/// Percent shares; groups under `threshold` of the total merge into "OTROS".
ChartSeries pie(const std::vector<ingest::ProductionRecord> &records, GroupBy group_by, double threshold = 0.01);

/// Equal-width histogram over [min, max] drawn as a polygon through bin
/// midpoints, closed by zero-count points half a bin outside each end.
/// Default bin count is Sturges' ceil(1 + log2 n).
ChartSeries frequency_polygon(std::span<const double> values, std::optional<int> bins = std::nullopt);

int sturges_bins(std::size_t n);

DepartmentStats department_stats(const std::vector<ingest::ProductionRecord> &records, std::string_view department);

} // namespace orecast::analytics
