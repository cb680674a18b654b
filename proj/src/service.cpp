#include "orecast/service.hpp"

#include "orecast/error.hpp"
#include "orecast/text.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#ifndef ORECAST_DATA_DIR
#define ORECAST_DATA_DIR "data"
#endif

namespace orecast::service {

namespace {

std::string dump(const Json &j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

/// Validated view over a query string.
class Params {
public:
	Params(const Query &q, std::initializer_list<std::string_view> allowed) {
		for (const auto &[key, value] : q) {
			if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
				throw ParamError("unknown query parameter '" + key + "'", key);
			}
			if (!values_.emplace(key, value).second) {
				throw ParamError("query parameter '" + key + "' given more than once", key);
			}
		}
	}

	std::optional<std::string> str(const std::string &key) const {
		const auto it = values_.find(key);
		if (it == values_.end()) {
			return std::nullopt;
		}
		if (text::trim(it->second).empty()) {
			throw ParamError("query parameter '" + key + "' is empty", key);
		}
		return it->second;
	}

	std::string required(const std::string &key) const {
		auto v = str(key);
		if (!v) {
			throw ParamError("query parameter '" + key + "' is required", key);
		}
		return *v;
	}

	template <class T> std::optional<T> number(const std::string &key) const {
		const auto v = str(key);
		if (!v) {
			return std::nullopt;
		}
		T out{};
		const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
		if (ec != std::errc{} || ptr != v->data() + v->size()) {
			throw ParamError("query parameter '" + key + "' is not a valid number: '" + *v + "'", key);
		}
		return out;
	}

	std::optional<bool> flag(const std::string &key) const {
		const auto v = str(key);
		if (!v) {
			return std::nullopt;
		}
		if (*v == "true" || *v == "1") {
			return true;
		}
		if (*v == "false" || *v == "0") {
			return false;
		}
		throw ParamError("query parameter '" + key + "' must be true or false", key);
	}

private:
	std::map<std::string, std::string> values_;
};

void no_params(const Query &q) {
	if (!q.empty()) {
		throw ParamError("unknown query parameter '" + q.begin()->first + "'", q.begin()->first);
	}
}

pipeline::ForecastRequest forecast_request(const Params &p, double alpha) {
	pipeline::ForecastRequest r;
	r.level = pipeline::parse_level(p.required("level"));
	r.target = p.required("target");
	r.mineral = p.str("mineral");
	r.horizon = p.number<int>("horizon");
	if (const auto m = p.str("model")) {
		r.model = pipeline::parse_model(*m);
	}
	r.confidence = p.number<double>("confidence").value_or(r.confidence);
	r.seed = p.number<std::uint64_t>("seed").value_or(r.seed);
	r.bootstrap = p.flag("bootstrap").value_or(false);
	r.replicates = p.number<int>("replicates").value_or(r.replicates);
	r.alpha = p.number<double>("alpha").value_or(alpha);
	r.validate();
	return r;
}

std::string cache_key(std::string_view path, const Query &query) {
	std::string key(path);
	char sep = '?';
	for (const auto &[k, v] : query) {
		key += sep + k + '=' + v;
		sep = '&';
	}
	return key;
}

bool is_department(const std::string &name) {
	return std::find(analytics::kDepartments.begin(), analytics::kDepartments.end(), name) !=
	       analytics::kDepartments.end();
}

Json error_body(const std::string &code, const std::string &message, const std::string &field = {}) {
	Json j{{"code", code}, {"message", message}};
	j["field"] = field.empty() ? Json(nullptr) : Json(field);
	return j;
}

} // namespace

Config Config::defaults() {
	Config c;
	const std::filesystem::path dir = ORECAST_DATA_DIR;
	c.monthly_path = dir / "production_monthly.csv";
	c.annual_path = dir / "production_annual.csv";
	c.geo_path = dir / "departments.geojson";
	return c;
}

void Config::validate() const {
	if (port < 0 || port > 65535) {
		throw ParamError("port must lie in 0..65535", "port");
	}
	if (k < 1) {
		throw KError("k must be at least 1", "k");
	}
	if (!(alpha > 0.0 && alpha < 1.0)) {
		throw ParamError("alpha must lie in (0, 1)", "alpha");
	}
	if (cache_size < 1) {
		throw ParamError("cache size must be at least 1", "cache_size");
	}
}

std::vector<GeoDepartment> parse_geo(std::string_view geojson) {
	Json doc;
	try {
		doc = Json::parse(geojson);
	} catch (const Json::parse_error &e) {
		throw SchemaError(std::string("boundary file is not valid JSON: ") + e.what(), "geo");
	}
	if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
	    !doc["features"].is_array()) {
		throw SchemaError("boundary file must be a GeoJSON FeatureCollection", "geo");
	}
	std::vector<GeoDepartment> out;
	std::set<std::string> seen;
	for (const auto &f : doc["features"]) {
		if (!f.contains("properties") || !f["properties"].contains("NOMBDEP") || !f["properties"]["NOMBDEP"].is_string()) {
			throw SchemaError("every feature needs a string NOMBDEP property", "NOMBDEP");
		}
		const auto name = text::normalize_name(f["properties"]["NOMBDEP"].get<std::string>());
		if (!is_department(name)) {
			throw SchemaError("unknown department in boundary file: '" + name + "'", "NOMBDEP");
		}
		if (!seen.insert(name).second) {
			throw SchemaError("department appears twice in boundary file: '" + name + "'", "NOMBDEP");
		}
		const auto &g = f.value("geometry", Json());
		const auto type = g.is_object() ? g.value("type", "") : "";
		if (type != "Polygon" && type != "MultiPolygon") {
			throw SchemaError("geometry of '" + name + "' must be a Polygon or MultiPolygon", "geometry");
		}
		out.push_back({name, g});
	}
	if (out.size() != analytics::kDepartments.size()) {
		std::string missing;
		for (auto d : analytics::kDepartments) {
			if (!seen.contains(std::string(d))) {
				missing += (missing.empty() ? "" : ", ") + std::string(d);
			}
		}
		throw SchemaError("boundary file is missing departments: " + missing, "NOMBDEP");
	}
	std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.name < b.name; });
	return out;
}

AppState load_state(const Config &config, bool with_geo) {
	config.validate();
	AppState st;
	auto monthly = ingest::parse_monthly(ingest::read_file(config.monthly_path));
	auto named = ingest::normalize_names(monthly.records);
	auto imputed = ingest::knn_impute(named.records, config.k);
	st.report = monthly.report;
	st.report.merge(named.report);
	st.report.merge(imputed.report);
	st.data.monthly = std::move(imputed.records);
	st.data.annual = ingest::parse_annual(ingest::read_file(config.annual_path));
	if (with_geo) {
		const auto geo_text = ingest::read_file(config.geo_path);
		st.geo = parse_geo(geo_text);
		st.geo_collection = Json::parse(geo_text);
	}
	return st;
}

LruCache::LruCache(std::size_t capacity) : capacity_(capacity) {
	if (capacity_ < 1) {
		throw ParamError("cache capacity must be at least 1", "cache_size");
	}
}

std::optional<std::string> LruCache::get(const std::string &key) {
	std::lock_guard lock(mutex_);
	const auto it = index_.find(key);
	if (it == index_.end()) {
		return std::nullopt;
	}
	order_.splice(order_.begin(), order_, it->second);
	return it->second->second;
}

void LruCache::put(const std::string &key, std::string value) {
	std::lock_guard lock(mutex_);
	if (const auto it = index_.find(key); it != index_.end()) {
		it->second->second = std::move(value);
		order_.splice(order_.begin(), order_, it->second);
		return;
	}
	order_.emplace_front(key, std::move(value));
	index_[key] = order_.begin();
	if (order_.size() > capacity_) {
		index_.erase(order_.back().first);
		order_.pop_back();
	}
}

std::size_t LruCache::size() const {
	std::lock_guard lock(mutex_);
	return order_.size();
}

Json charts_json(const std::vector<ingest::ProductionRecord> &records, analytics::ChartKind kind,
                 const ChartQuery &query) {
	auto selected = analytics::filter(records, {query.mineral, query.department});
	if (query.year) {
		std::erase_if(selected, [&](const auto &r) { return r.year != *query.year; });
	}
	if (selected.empty()) {
		throw EmptySelectionError("no records match the chart filters", query.mineral ? "mineral" : "department");
	}
	Json charts = Json::array();
	switch (kind) {
	case analytics::ChartKind::Bar:
		for (const auto &s : analytics::aggregate(selected, query.group_by)) {
			charts.push_back(s);
		}
		break;
	case analytics::ChartKind::Pie: charts.push_back(analytics::pie(selected, query.group_by, query.threshold)); break;
	case analytics::ChartKind::FrequencyPolygon: {
		std::set<std::string> units;
		std::vector<double> totals;
		for (const auto &r : selected) {
			units.insert(r.unit);
			totals.push_back(analytics::record_total(r));
		}
		if (units.size() > 1) {
			throw MixedUnitError("frequency polygon needs a single unit; filter by mineral first", "mineral");
		}
		auto s = analytics::frequency_polygon(totals, query.bins);
		s.unit = *units.begin();
		s.title = "Distribution of record totals (" + s.unit + ")";
		charts.push_back(s);
		break;
	}
	}
	return Json{{"charts", charts}};
}

Service::Service(AppState state, Config config)
    : state_(std::move(state)), config_(std::move(config)), cache_(config_.cache_size) {}

Response Service::get(std::string_view path, const Query &query) const {
	try {
		if (path == "/api/forecast" || path == "/api/diagnostics") {
			return {200, pipeline_body(path, query, path == "/api/forecast")};
		}
		return {200, dump(route(path, query))};
	} catch (const UnknownDepartmentError &e) {
		return {404, dump(error_json(e))};
	} catch (const Error &e) {
		return {e.code() == "NotFound" ? 404 : 400, dump(error_json(e))};
	} catch (const std::exception &e) {
		return {500, dump(error_body("InternalError", e.what()))};
	}
}

std::string Service::pipeline_body(std::string_view path, const Query &query, bool forecast) const {
	const Params p(query, {"level", "target", "mineral", "horizon", "model", "confidence", "seed", "bootstrap",
	                       "replicates", "alpha"});
	const auto request = forecast_request(p, config_.alpha);
	const auto key = cache_key(path, query);
	if (auto hit = cache_.get(key)) {
		return *hit;
	}
	auto body = dump(Json(forecast ? pipeline::run_forecast(request, state_.data)
	                               : pipeline::run_diagnostics(request, state_.data)));
	cache_.put(key, body);
	return body;
}

Json Service::route(std::string_view path, const Query &query) const {
	constexpr std::string_view kDeptPrefix = "/api/departments/";
	constexpr std::string_view kChartPrefix = "/api/charts/";

	if (path == "/api/health") {
		no_params(query);
		return Json{{"status", "ok"}};
	}
	if (path == "/api/departments") {
		no_params(query);
		Json names = Json::array();
		for (auto d : analytics::kDepartments) {
			names.push_back(std::string(d));
		}
		return Json{{"departments", names}};
	}
	if (path.starts_with(kDeptPrefix) && path.ends_with("/stats")) {
		no_params(query);
		const auto raw = path.substr(kDeptPrefix.size(), path.size() - kDeptPrefix.size() - 6);
		const auto name = text::normalize_name(raw);
		if (!is_department(name)) {
			throw UnknownDepartmentError("unknown department '" + name + "'", "name");
		}
		return Json(analytics::department_stats(state_.data.monthly, name));
	}
	if (path == "/api/minerals") {
		no_params(query);
		std::map<std::pair<std::string, std::string>, std::size_t> counts;
		for (const auto &r : state_.data.monthly) {
			++counts[{text::normalize_name(r.mineral), r.unit}];
		}
		Json monthly = Json::array();
		for (const auto &[key, n] : counts) {
			monthly.push_back(Json{{"mineral", key.first}, {"unit", key.second}, {"record_count", n}});
		}
		Json annual = Json::array();
		for (const auto &c : state_.data.annual.columns) {
			annual.push_back(Json{{"mineral", c.mineral}, {"unit", c.unit}});
		}
		return Json{{"monthly", monthly}, {"annual", annual}};
	}
	if (path.starts_with(kChartPrefix)) {
		const auto kind_name = path.substr(kChartPrefix.size());
		analytics::ChartKind kind;
		if (kind_name == "bar") {
			kind = analytics::ChartKind::Bar;
		} else if (kind_name == "pie") {
			kind = analytics::ChartKind::Pie;
		} else if (kind_name == "polygon") {
			kind = analytics::ChartKind::FrequencyPolygon;
		} else {
			throw Error("NotFound", "chart kind must be bar, pie or polygon", "kind");
		}
		const Params p(query, {"group_by", "mineral", "department", "year", "bins", "threshold"});
		ChartQuery cq;
		if (const auto g = p.str("group_by")) {
			cq.group_by = analytics::parse_group_by(*g);
		}
		cq.mineral = p.str("mineral");
		cq.department = p.str("department");
		cq.year = p.number<int>("year");
		cq.bins = p.number<int>("bins");
		cq.threshold = p.number<double>("threshold").value_or(cq.threshold);
		return charts_json(state_.data.monthly, kind, cq);
	}
	if (path == "/api/geo") {
		no_params(query);
		if (state_.geo.empty()) {
			throw Error("NotFound", "no department boundaries loaded", "geo");
		}
		return state_.geo_collection;
	}
	throw Error("NotFound", "no such endpoint: " + std::string(path));
}

} // namespace orecast::service
