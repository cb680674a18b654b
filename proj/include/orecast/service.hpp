#pragma once

#include "orecast/analytics.hpp"
#include "orecast/ingest.hpp"
#include "orecast/json.hpp"
#include "orecast/pipeline.hpp"

#include <cstddef>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace orecast::service {

struct Config {
	std::filesystem::path monthly_path;
	std::filesystem::path annual_path;
	std::filesystem::path geo_path;
	std::string host = "127.0.0.1";
	int port = 8080;
	int k = 5;
	double alpha = 0.05;
	std::size_t cache_size = 256;
	std::optional<std::filesystem::path> static_dir;

	/// Paths point into the bundled data directory.
	static Config defaults();
	/// Throws ParamError for out-of-range values.
	void validate() const;
};

struct GeoDepartment {
	std::string name;
	Json geometry;
};

/// Loaded once at startup, never modified afterwards.
struct AppState {
	pipeline::Dataset data;
	ingest::CleaningReport report;
	/// Sorted by name; empty when no boundary file was loaded.
	std::vector<GeoDepartment> geo;
	Json geo_collection;
};

/// Checks a FeatureCollection whose features carry "NOMBDEP": exactly the
/// 25 departments after name normalization, each once. Throws SchemaError.
std::vector<GeoDepartment> parse_geo(std::string_view geojson);

/// Parses, normalizes and imputes the monthly file, parses the annual
/// file and, when `with_geo`, the boundary file.
AppState load_state(const Config &config, bool with_geo = true);

/// Thread-safe least-recently-used map from request key to response body.
class LruCache {
public:
	explicit LruCache(std::size_t capacity);

	std::optional<std::string> get(const std::string &key);
	void put(const std::string &key, std::string value);
	std::size_t size() const;
	std::size_t capacity() const noexcept { return capacity_; }

private:
	using Entry = std::pair<std::string, std::string>;
	std::size_t capacity_;
	mutable std::mutex mutex_;
	std::list<Entry> order_;
	std::unordered_map<std::string, std::list<Entry>::iterator> index_;
};

using Query = std::multimap<std::string, std::string>;

struct Response {
	int status = 200;
	std::string body;
};

struct ChartQuery {
	analytics::GroupBy group_by = analytics::GroupBy::Department;
	std::optional<std::string> mineral;
	std::optional<std::string> department;
	std::optional<int> year;
	std::optional<int> bins;
	double threshold = 0.01;
};

/// {"charts": [ChartSeries...]}; a bar request yields one series per unit.
Json charts_json(const std::vector<ingest::ProductionRecord> &records, analytics::ChartKind kind,
                 const ChartQuery &query);

/// Request routing over an immutable AppState. Safe to call concurrently.
class Service {
public:
	Service(AppState state, Config config);

	/// Handles GET `path` (already URL-decoded). Never throws.
	Response get(std::string_view path, const Query &query) const;

	const AppState &state() const noexcept { return state_; }
	const Config &config() const noexcept { return config_; }
	std::size_t cached() const { return cache_.size(); }

private:
	Json route(std::string_view path, const Query &query) const;
	std::string pipeline_body(std::string_view path, const Query &query, bool forecast) const;

	const AppState state_;
	const Config config_;
	mutable LruCache cache_;
};

/// HTTP front end for a Service: GET /api/* plus an optional static mount.
class HttpServer {
public:
	explicit HttpServer(const Service &service);
	~HttpServer();
	HttpServer(const HttpServer &) = delete;
	HttpServer &operator=(const HttpServer &) = delete;

	/// Port 0 picks a free port. Returns the bound port. Throws BindError.
	int bind(const std::string &host, int port);
	/// Blocks until stop().
	void listen();
	void stop();

private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

/// Binds to the configured host and port and serves until stopped.
void serve(const Service &service);

} // namespace orecast::service
