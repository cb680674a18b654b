#include "orecast/analytics.hpp"

#include "orecast/error.hpp"
#include "orecast/text.hpp"

#include <algorithm>
#include <cmath>

namespace orecast::analytics {

namespace {

std::string group_key(const ingest::ProductionRecord &r, GroupBy g) {
	switch (g) {
	case GroupBy::Mineral: return text::normalize_name(r.mineral);
	case GroupBy::Department: return text::normalize_name(r.department);
	case GroupBy::Year: return std::to_string(r.year);
	case GroupBy::Stratum: return text::normalize_name(r.stratum);
	case GroupBy::Stage: return text::normalize_name(r.stage);
	}
	return {};
}

// Sums in sorted order so the result does not depend on record order.
double stable_sum(std::vector<double> v) {
	std::sort(v.begin(), v.end());
	double s = 0.0;
	for (double x : v) {
		s += x;
	}
	return s;
}

using Groups = std::map<std::string, std::map<std::string, std::vector<double>>>;

// unit -> group -> contributions
Groups collect(const std::vector<ingest::ProductionRecord> &records, GroupBy g) {
	if (records.empty()) {
		throw EmptyError("no records to aggregate");
	}
	Groups out;
	for (const auto &r : records) {
		out[r.unit][group_key(r, g)].push_back(record_total(r));
	}
	return out;
}

std::vector<std::pair<std::string, double>> ranked(const std::map<std::string, std::vector<double>> &groups) {
	std::vector<std::pair<std::string, double>> v;
	v.reserve(groups.size());
	for (const auto &[label, parts] : groups) {
		v.emplace_back(label, stable_sum(parts));
	}
	std::sort(v.begin(), v.end(), [](const auto &a, const auto &b) {
		return a.second != b.second ? a.second > b.second : a.first < b.first;
	});
	return v;
}

} // namespace

std::string to_string(ChartKind kind) {
	switch (kind) {
	case ChartKind::Bar: return "bar";
	case ChartKind::Pie: return "pie";
	case ChartKind::FrequencyPolygon: return "polygon";
	}
	return {};
}

std::string to_string(GroupBy g) {
	switch (g) {
	case GroupBy::Mineral: return "mineral";
	case GroupBy::Department: return "department";
	case GroupBy::Year: return "year";
	case GroupBy::Stratum: return "stratum";
	case GroupBy::Stage: return "stage";
	}
	return {};
}

GroupBy parse_group_by(std::string_view name) {
	for (GroupBy g : {GroupBy::Mineral, GroupBy::Department, GroupBy::Year, GroupBy::Stratum, GroupBy::Stage}) {
		if (to_string(g) == name) {
			return g;
		}
	}
	throw ParamError("group_by must be one of mineral, department, year, stratum, stage; got '" + std::string(name) +
	                     "'",
	                 "group_by");
}

std::vector<ingest::ProductionRecord> filter(const std::vector<ingest::ProductionRecord> &records,
                                             const ingest::Selector &selector) {
	const auto mineral = selector.mineral ? std::optional(text::normalize_name(*selector.mineral)) : std::nullopt;
	const auto dept = selector.department ? std::optional(text::normalize_name(*selector.department)) : std::nullopt;
	std::vector<ingest::ProductionRecord> out;
	for (const auto &r : records) {
		if ((!mineral || text::normalize_name(r.mineral) == *mineral) &&
		    (!dept || text::normalize_name(r.department) == *dept)) {
			out.push_back(r);
		}
	}
	return out;
}

double record_total(const ingest::ProductionRecord &r) { return r.total.value_or(r.month_sum()); }

std::vector<ChartSeries> aggregate(const std::vector<ingest::ProductionRecord> &records, GroupBy group_by) {
	std::vector<ChartSeries> out;
	for (const auto &[unit, groups] : collect(records, group_by)) {
		ChartSeries s;
		s.kind = ChartKind::Bar;
		s.unit = unit;
		s.title = "Production by " + to_string(group_by) + (unit.empty() ? "" : " (" + unit + ")");
		for (const auto &[label, value] : ranked(groups)) {
			s.labels.push_back(label);
			s.values.push_back(value);
		}
		out.push_back(std::move(s));
	}
	return out;
}

ChartSeries pie(const std::vector<ingest::ProductionRecord> &records, GroupBy group_by, double threshold) {
	if (!(threshold >= 0.0 && threshold < 1.0)) {
		throw ParamError("pie threshold must lie in [0, 1)", "threshold");
	}
	const auto all = collect(records, group_by);
	if (all.size() > 1) {
		std::string list;
		for (const auto &[unit, groups] : all) {
			list += (list.empty() ? "" : ", ") + unit;
		}
		throw MixedUnitError("pie chart needs a single unit, records use: " + list + "; filter by mineral first",
		                     "mineral");
	}
	const auto &[unit, groups] = *all.begin();
	const auto rank = ranked(groups);
	double grand = 0.0;
	for (const auto &[label, v] : rank) {
		grand += v;
	}
	if (!(grand > 0.0)) {
		throw DegenerateError("pie chart needs a positive grand total");
	}

	ChartSeries s;
	s.kind = ChartKind::Pie;
	s.unit = unit;
	s.title = "Share by " + to_string(group_by) + (unit.empty() ? "" : " (" + unit + ")");
	double other = 0.0;
	bool any_other = false;
	for (const auto &[label, v] : rank) {
		if (v / grand < threshold) {
			other += v;
			any_other = true;
		} else {
			s.labels.push_back(label);
			s.values.push_back(100.0 * v / grand);
		}
	}
	if (any_other) {
		s.labels.push_back("OTROS");
		s.values.push_back(100.0 * other / grand);
	}
	return s;
}

int sturges_bins(std::size_t n) {
	if (n < 1) {
		throw EmptyError("no values to bin");
	}
	return static_cast<int>(std::ceil(1.0 + std::log2(static_cast<double>(n))));
}

ChartSeries frequency_polygon(std::span<const double> values, std::optional<int> bins) {
	if (values.empty()) {
		throw EmptyError("no values for a frequency polygon");
	}
	if (bins && *bins < 1) {
		throw ParamError("bin count must be positive", "bins");
	}
	const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
	const double lo = *lo_it;
	const double hi = *hi_it;
	if (!(hi > lo)) {
		throw DegenerateError("frequency polygon needs values with positive spread");
	}
	const int k = bins.value_or(sturges_bins(values.size()));
	const double width = (hi - lo) / k;
	std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
	for (double v : values) {
		auto idx = static_cast<long>(std::floor((v - lo) / width));
		idx = std::clamp(idx, 0L, static_cast<long>(k) - 1);
		counts[static_cast<std::size_t>(idx)] += 1.0;
	}

	ChartSeries s;
	s.kind = ChartKind::FrequencyPolygon;
	s.title = "Frequency polygon";
	auto point = [&](double x, double c) {
		s.x.push_back(x);
		s.labels.push_back(text::format_double(x));
		s.values.push_back(c);
	};
	point(lo - 0.5 * width, 0.0);
	for (int i = 0; i < k; ++i) {
		point(lo + (i + 0.5) * width, counts[static_cast<std::size_t>(i)]);
	}
	point(hi + 0.5 * width, 0.0);
	return s;
}

DepartmentStats department_stats(const std::vector<ingest::ProductionRecord> &records, std::string_view department) {
	const std::string name = text::normalize_name(department);
	DepartmentStats st;
	st.department = name;
	std::map<std::pair<std::string, std::string>, std::vector<double>> totals;
	std::map<std::string, std::size_t> unit_records;
	for (const auto &r : records) {
		if (text::normalize_name(r.department) != name) {
			continue;
		}
		if (st.record_count == 0) {
			st.year_min = st.year_max = r.year;
		}
		++st.record_count;
		st.year_min = std::min(st.year_min, r.year);
		st.year_max = std::max(st.year_max, r.year);
		totals[{text::normalize_name(r.mineral), r.unit}].push_back(record_total(r));
		++unit_records[r.unit];
	}
	if (st.record_count == 0) {
		throw UnknownDepartmentError("no production records for department '" + name + "'", "department");
	}

	std::map<std::string, double> best;
	for (const auto &[key, parts] : totals) {
		const auto &[mineral, unit] = key;
		const double q = stable_sum(parts);
		st.total_by_mineral.push_back({mineral, unit, q});
		const auto it = best.find(unit);
		if (it == best.end() || q > it->second) {
			best[unit] = q;
			st.top_by_unit[unit] = mineral;
		}
	}
	const auto main_unit = std::max_element(unit_records.begin(), unit_records.end(), [](const auto &a, const auto &b) {
		return a.second < b.second;
	});
	st.top_mineral = st.top_by_unit[main_unit->first];
	return st;
}

} // namespace orecast::analytics
