#include "orecast/json.hpp"

#include <cstdio>
#include <map>

namespace orecast {

namespace {

Json labels(CalendarPoint start, Frequency freq, std::size_t n) {
	Json out = Json::array();
	for (std::size_t i = 0; i < n; ++i) {
		out.push_back(period_label(start.advance(static_cast<long>(i), freq), freq));
	}
	return out;
}

std::string frequency_name(Frequency f) { return f == Frequency::Monthly ? "monthly" : "annual"; }

} // namespace

std::string period_label(const CalendarPoint &p, Frequency freq) {
	if (freq == Frequency::Annual) {
		return std::to_string(p.year);
	}
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02d", p.year, p.month);
	return buf;
}

void to_json(Json &j, const CalendarPoint &p) { j = Json{{"year", p.year}, {"month", p.month}}; }

void to_json(Json &j, const TimeSeries &s) {
	j = Json{{"start", period_label(s.start(), s.frequency())},
	         {"frequency", frequency_name(s.frequency())},
	         {"unit", s.unit()},
	         {"periods", labels(s.start(), s.frequency(), s.size())},
	         {"values", Json(std::vector<double>(s.values().begin(), s.values().end()))}};
}

Json error_json(const Error &e) {
	Json j{{"code", e.code()}, {"message", e.what()}};
	j["field"] = e.field().empty() ? Json(nullptr) : Json(e.field());
	return j;
}

namespace arima {

void to_json(Json &j, const ArimaSpec &s) { j = Json{{"p", s.p}, {"d", s.d}, {"q", s.q}}; }

void to_json(Json &j, const ForecastResult &f) {
	j = Json{{"horizon", f.horizon},
	         {"level", f.level},
	         {"unit", f.unit},
	         {"frequency", frequency_name(f.frequency)},
	         {"periods", labels(f.start, f.frequency, f.mean.size())},
	         {"mean", f.mean},
	         {"lower", f.lower},
	         {"upper", f.upper}};
}

} // namespace arima

namespace diagnostics {

void to_json(Json &j, const TestResult &t) {
	j = Json{{"test_name", t.test_name}, {"statistic", t.statistic}, {"p_value", t.p_value}, {"df_or_n", t.df_or_n}};
}

void to_json(Json &j, const BootstrapForecast &b) {
	j = Json{{"horizon", b.horizon}, {"level", b.level}, {"replicates", b.replicates}, {"seed", b.seed},
	         {"mean", b.mean},       {"lower", b.lower}, {"upper", b.upper}};
}

void to_json(Json &j, const TestFailure &f) {
	j = Json{{"test_name", f.test_name}, {"code", f.code}, {"message", f.message}};
}

void to_json(Json &j, const DiagnosticsReport &r) {
	j = Json{{"alpha", r.alpha}};
	j["ljung_box"] = r.ljung_box ? Json(*r.ljung_box) : Json(nullptr);
	j["shapiro_wilk"] = r.shapiro_wilk ? Json(*r.shapiro_wilk) : Json(nullptr);
	j["ljung_box_pass"] = r.ljung_box_pass;
	j["shapiro_wilk_pass"] = r.shapiro_wilk_pass;
	j["errors"] = r.errors;
}

} // namespace diagnostics

namespace ingest {

void to_json(Json &j, const Notice &n) { j = Json{{"row", n.row}, {"column", n.column}, {"action", n.action}}; }

void to_json(Json &j, const CleaningReport &r) {
	j = Json{{"rows_read", r.rows_read},
	         {"rows_dropped", r.rows_dropped},
	         {"rows_kept", r.rows_kept()},
	         {"names_corrected", r.names_corrected},
	         {"values_imputed", r.values_imputed},
	         {"messages", r.messages}};
}

} // namespace ingest

namespace analytics {

namespace {

std::string kind_name(ChartKind k) {
	switch (k) {
	case ChartKind::Bar: return "Bar";
	case ChartKind::Pie: return "Pie";
	case ChartKind::FrequencyPolygon: return "FrequencyPolygon";
	}
	return {};
}

} // namespace

void to_json(Json &j, const ChartSeries &s) {
	j = Json{{"kind", kind_name(s.kind)}, {"title", s.title}, {"unit", s.unit}, {"labels", s.labels},
	         {"values", s.values}};
	if (!s.x.empty()) {
		j["x"] = s.x;
	}
}

void to_json(Json &j, const MineralTotal &m) {
	j = Json{{"mineral", m.mineral}, {"unit", m.unit}, {"quantity", m.quantity}};
}

void to_json(Json &j, const DepartmentStats &s) {
	std::map<std::string, int> units_per_mineral;
	for (const auto &m : s.total_by_mineral) {
		++units_per_mineral[m.mineral];
	}
	Json totals = Json::object();
	for (const auto &m : s.total_by_mineral) {
		const auto key = units_per_mineral[m.mineral] > 1 ? m.mineral + " (" + m.unit + ")" : m.mineral;
		totals[key] = Json{{"quantity", m.quantity}, {"unit", m.unit}};
	}
	j = Json{{"department", s.department},
	         {"total_by_mineral", totals},
	         {"top_mineral", s.top_mineral},
	         {"top_by_unit", s.top_by_unit},
	         {"record_count", s.record_count},
	         {"years_covered", {s.year_min, s.year_max}}};
}

} // namespace analytics

namespace pipeline {

void to_json(Json &j, const ForecastRequest &r) {
	j = Json{{"level", to_string(r.level)}, {"target", r.target}};
	j["mineral"] = r.mineral ? Json(*r.mineral) : Json(nullptr);
	j["horizon"] = r.horizon ? Json(*r.horizon) : Json(nullptr);
	j["model"] = to_string(r.model);
	j["confidence"] = r.confidence;
	j["seed"] = r.seed;
	j["bootstrap"] = r.bootstrap;
	if (r.bootstrap) {
		j["replicates"] = r.replicates;
	}
	j["alpha"] = r.alpha;
}

void to_json(Json &j, const SeriesSummary &s) {
	j = Json{{"n", s.n},
	         {"start", period_label(s.start, s.frequency)},
	         {"end", period_label(s.end, s.frequency)},
	         {"frequency", frequency_name(s.frequency)},
	         {"unit", s.unit},
	         {"periods", labels(s.start, s.frequency, s.values.size())},
	         {"values", s.values}};
}

void to_json(Json &j, const FitSummary &f) {
	j = Json{{"family", f.family}, {"model", f.model}};
	if (f.order) {
		j["spec"] = *f.order;
		j["c"] = f.c;
		j["phi"] = f.phi;
		j["theta"] = f.theta;
		j["sigma2"] = f.sigma2;
		j["n_effective"] = f.n_effective;
	} else {
		j["kind"] = f.model;
		j["q_variances"] = f.q_variances;
		j["r_variance"] = f.r_variance;
	}
	j["loglik"] = f.loglik;
	j["aic"] = f.aic;
}

void to_json(Json &j, const PipelineResult &r) {
	j = Json{{"request", r.request}, {"series_used", r.series}, {"fit", r.fit}, {"diagnostics", r.diagnostics}};
	if (r.forecast.horizon > 0) {
		j["forecast"] = r.forecast;
	}
	j["bootstrap"] = r.bootstrap ? Json(*r.bootstrap) : Json(nullptr);
	j["notes"] = r.notes;
}

} // namespace pipeline

} // namespace orecast
