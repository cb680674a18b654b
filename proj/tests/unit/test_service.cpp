#include <doctest.h>

#include "orecast/error.hpp"
#include "orecast/service.hpp"
#include "support/api_schema.hpp"

#include <httplib.h>

#include <algorithm>
#include <functional>
#include <random>
#include <thread>

using namespace orecast;
using namespace orecast::service;

namespace {

const Service &shared_service() {
	static const Service svc(load_state(Config::defaults()), Config::defaults());
	return svc;
}

const support::ApiSchema &schema() {
	static const support::ApiSchema s;
	return s;
}

Json parsed(const Response &r) { return Json::parse(r.body); }

void expect_error(const Response &r, int status, const std::string &code, const std::string &field) {
	CAPTURE(r.body);
	CHECK(r.status == status);
	CHECK(schema().check(r.body, "error") == "");
	const auto j = parsed(r);
	CHECK(j["code"] == code);
	if (field.empty()) {
		CHECK(j["field"].is_null());
	} else {
		CHECK(j["field"] == field);
	}
}

std::string geo_with(const std::function<void(Json &)> &edit) {
	auto collection = shared_service().state().geo_collection;
	edit(collection);
	return collection.dump();
}

} // namespace

TEST_CASE("read-only endpoints match the schema") {
	const auto &svc = shared_service();
	const std::vector<std::pair<std::string, std::string>> cases = {
	    {"/api/health", "health"},
	    {"/api/departments", "departments"},
	    {"/api/minerals", "minerals"},
	    {"/api/geo", "geo"},
	};
	for (const auto &[path, def] : cases) {
		CAPTURE(path);
		const auto r = svc.get(path, {});
		CHECK(r.status == 200);
		CHECK(schema().check(r.body, def) == "");
	}
	const auto depts = parsed(svc.get("/api/departments", {}))["departments"];
	REQUIRE(depts.size() == 25);
	for (const auto &d : depts) {
		const auto name = d.get<std::string>();
		CAPTURE(name);
		const auto r = svc.get("/api/departments/" + name + "/stats", {});
		CHECK(r.status == 200);
		CHECK(schema().check(r.body, "department_stats") == "");
		CHECK(parsed(r)["department"] == name);
	}
}

TEST_CASE("department names are normalized in the stats path") {
	const auto &svc = shared_service();
	const auto a = svc.get("/api/departments/Áncash/stats", {});
	const auto b = svc.get("/api/departments/ancash/stats", {});
	CHECK(a.status == 200);
	CHECK(a.body == b.body);
}

TEST_CASE("chart endpoints match the schema") {
	const auto &svc = shared_service();
	const std::vector<std::pair<std::string, Query>> cases = {
	    {"/api/charts/bar", {}},
	    {"/api/charts/bar", {{"group_by", "mineral"}}},
	    {"/api/charts/bar", {{"group_by", "year"}, {"mineral", "ORO"}}},
	    {"/api/charts/bar", {{"group_by", "stratum"}, {"department", "Puno"}, {"year", "2021"}}},
	    {"/api/charts/pie", {{"mineral", "COBRE"}}},
	    {"/api/charts/pie", {{"mineral", "ORO"}, {"threshold", "0.05"}}},
	    {"/api/charts/polygon", {{"mineral", "ZINC"}}},
	    {"/api/charts/polygon", {{"mineral", "ORO"}, {"bins", "7"}}},
	};
	for (const auto &[path, query] : cases) {
		CAPTURE(path);
		CAPTURE(Json(query).dump());
		const auto r = svc.get(path, query);
		CHECK(r.status == 200);
		CHECK(schema().check(r.body, "charts") == "");
	}
	const auto pie = parsed(svc.get("/api/charts/pie", {{"mineral", "COBRE"}}))["charts"][0];
	double share = 0.0;
	for (const auto &v : pie["values"]) {
		share += v.get<double>();
	}
	CHECK(share == doctest::Approx(100.0).epsilon(1e-9));
	const auto poly = parsed(svc.get("/api/charts/polygon", {{"mineral", "ORO"}, {"bins", "7"}}))["charts"][0];
	REQUIRE(poly["values"].size() == 9);
	CHECK(poly["values"][0] == 0.0);
	CHECK(poly["values"][8] == 0.0);
}

TEST_CASE("forecast and diagnostics endpoints match the schema") {
	const auto &svc = shared_service();
	const std::vector<Query> forecasts = {
	    {{"level", "annual"}, {"target", "COBRE"}},
	    {{"level", "annual"}, {"target", "ORO"}, {"model", "statespace"}, {"horizon", "3"}},
	    {{"level", "mineral"}, {"target", "ORO"}, {"model", "best"}},
	    {{"level", "mineral"}, {"target", "PLATA"}, {"bootstrap", "true"}, {"replicates", "200"}, {"seed", "7"}},
	    {{"level", "department"}, {"target", "Arequipa"}, {"mineral", "ORO"}, {"confidence", "0.8"}},
	};
	for (const auto &q : forecasts) {
		CAPTURE(Json(q).dump());
		const auto r = svc.get("/api/forecast", q);
		REQUIRE(r.status == 200);
		CHECK(schema().check(r.body, "forecast") == "");
	}
	const auto annual = parsed(svc.get("/api/forecast", forecasts[0]));
	CHECK(annual["forecast"]["horizon"] == pipeline::kAnnualHorizon);
	CHECK(annual["forecast"]["periods"][0] == "2023");
	const auto monthly = parsed(svc.get("/api/forecast", forecasts[2]));
	CHECK(monthly["forecast"]["horizon"] == pipeline::kMonthlyHorizon);
	CHECK(monthly["forecast"]["periods"][0] == "2023-01");
	const auto boot = parsed(svc.get("/api/forecast", forecasts[3]));
	CHECK(boot["bootstrap"]["replicates"] == 200);

	const auto d = svc.get("/api/diagnostics", {{"level", "mineral"}, {"target", "ZINC"}});
	REQUIRE(d.status == 200);
	CHECK(schema().check(d.body, "diagnostics") == "");
	CHECK_FALSE(parsed(d).contains("forecast"));
}

TEST_CASE("invalid requests give structured errors") {
	const auto &svc = shared_service();
	expect_error(svc.get("/api/forecast", {{"level", "annual"}}), 400, "ParamError", "target");
	expect_error(svc.get("/api/forecast", {{"level", "annual"}, {"target", "COBRE"}, {"colour", "red"}}), 400,
	             "ParamError", "colour");
	expect_error(svc.get("/api/forecast", {{"level", "annual"}, {"target", "COBRE"}, {"horizon", "3x"}}), 400,
	             "ParamError", "horizon");
	expect_error(svc.get("/api/forecast", {{"level", "annual"}, {"target", "COBRE"}, {"horizon", "0"}}), 400,
	             "HorizonError", "horizon");
	expect_error(svc.get("/api/forecast", {{"level", "yearly"}, {"target", "COBRE"}}), 400, "ParamError", "level");
	expect_error(
	    svc.get("/api/forecast", {{"level", "annual"}, {"target", "COBRE"}, {"seed", "1"}, {"seed", "2"}}), 400,
	    "ParamError", "seed");
	expect_error(svc.get("/api/forecast", {{"level", "annual"}, {"target", "COBRE"}, {"bootstrap", "maybe"}}), 400,
	             "ParamError", "bootstrap");
	expect_error(svc.get("/api/forecast", {{"level", "department"}, {"target", "Narnia"}}), 400, "SelectionError",
	             "target");
	expect_error(svc.get("/api/health", {{"x", "1"}}), 400, "ParamError", "x");
	expect_error(svc.get("/api/charts/bar", {{"group_by", "colour"}}), 400, "ParamError", "group_by");
	expect_error(svc.get("/api/charts/pie", {{"mineral", "KRYPTONITE"}}), 400, "EmptySelectionError", "mineral");
	expect_error(svc.get("/api/charts/polygon", {}), 400, "MixedUnitError", "mineral");

	expect_error(svc.get("/api/departments/Narnia/stats", {}), 404, "UnknownDepartmentError", "name");
	expect_error(svc.get("/api/charts/scatter", {}), 404, "NotFound", "kind");
	expect_error(svc.get("/api/nothing", {}), 404, "NotFound", "");
}

TEST_CASE("pipeline responses are deterministic and cached") {
	const Config config = [] {
		auto c = Config::defaults();
		c.cache_size = 2;
		return c;
	}();
	const Service svc(load_state(config, false), config);
	const Query q = {{"level", "annual"}, {"target", "ZINC"}};
	const auto first = svc.get("/api/forecast", q);
	CHECK(svc.cached() == 1);
	const auto second = svc.get("/api/forecast", q);
	CHECK(svc.cached() == 1);
	CHECK(first.body == second.body);

	const Service fresh(load_state(config, false), config);
	CHECK(fresh.get("/api/forecast", q).body == first.body);

	svc.get("/api/diagnostics", q);
	svc.get("/api/forecast", {{"level", "annual"}, {"target", "PLOMO"}});
	CHECK(svc.cached() == 2);
	svc.get("/api/forecast", {{"level", "annual"}, {"target", "CADMIO"}, {"horizon", "0"}});
	CHECK(svc.cached() == 2);

	CHECK(svc.get("/api/geo", {}).status == 404);
}

TEST_CASE("LruCache agrees with a reference model") {
	std::mt19937 rng(5);
	for (std::size_t capacity : {1u, 2u, 3u, 8u}) {
		LruCache cache(capacity);
		std::vector<std::pair<std::string, std::string>> model;  // front is most recent
		for (int step = 0; step < 2000; ++step) {
			const std::string key = "k" + std::to_string(rng() % 12);
			auto it = std::find_if(model.begin(), model.end(), [&](const auto &e) { return e.first == key; });
			if (rng() % 2 == 0) {
				const auto got = cache.get(key);
				if (it == model.end()) {
					CHECK_FALSE(got.has_value());
				} else {
					REQUIRE(got.has_value());
					CHECK(*got == it->second);
					auto entry = *it;
					model.erase(it);
					model.insert(model.begin(), entry);
				}
			} else {
				const std::string value = std::to_string(step);
				cache.put(key, value);
				if (it != model.end()) {
					model.erase(it);
				}
				model.insert(model.begin(), {key, value});
				if (model.size() > capacity) {
					model.pop_back();
				}
			}
			REQUIRE(cache.size() == model.size());
		}
	}
	CHECK_THROWS_AS(LruCache(0), ParamError);
}

TEST_CASE("concurrent requests see the same bodies") {
	const auto &svc = shared_service();
	const Query q = {{"level", "mineral"}, {"target", "ZINC"}, {"model", "best"}};
	const auto expected = svc.get("/api/forecast", q).body;
	std::vector<std::string> bodies(8);
	std::vector<std::thread> threads;
	for (std::size_t i = 0; i < bodies.size(); ++i) {
		threads.emplace_back([&, i] {
			bodies[i] = (i % 2 ? svc.get("/api/forecast", q) : svc.get("/api/departments/Lima/stats", {})).body;
		});
	}
	for (auto &t : threads) {
		t.join();
	}
	const auto lima = svc.get("/api/departments/Lima/stats", {}).body;
	for (std::size_t i = 0; i < bodies.size(); ++i) {
		CHECK(bodies[i] == (i % 2 ? expected : lima));
	}
}

TEST_CASE("HttpServer answers over a socket") {
	const auto &svc = shared_service();
	HttpServer server(svc);
	const int port = server.bind("127.0.0.1", 0);
	REQUIRE(port > 0);
	std::thread loop([&] { server.listen(); });

	httplib::Client client("127.0.0.1", port);
	client.set_connection_timeout(5);
	auto health = client.Get("/api/health");
	REQUIRE(health);
	CHECK(health->status == 200);
	CHECK(health->get_header_value("Content-Type") == "application/json; charset=utf-8");
	CHECK(health->body == R"({"status":"ok"})");

	auto stats = client.Get("/api/departments/Madre%20de%20Dios/stats");
	REQUIRE(stats);
	CHECK(stats->status == 200);
	CHECK(schema().check(stats->body, "department_stats") == "");

	auto bad = client.Get("/api/forecast?level=annual&target=COBRE&horizon=abc");
	REQUIRE(bad);
	CHECK(bad->status == 400);
	CHECK(Json::parse(bad->body)["field"] == "horizon");

	auto missing = client.Get("/api/unknown");
	REQUIRE(missing);
	CHECK(missing->status == 404);

	HttpServer other(svc);
	CHECK_THROWS_AS(other.bind("127.0.0.1", port), BindError);

	server.stop();
	loop.join();
}

TEST_CASE("parse_geo rejects malformed boundary files") {
	const auto good = shared_service().state().geo_collection.dump();
	const auto geo = parse_geo(good);
	REQUIRE(geo.size() == 25);
	CHECK(std::is_sorted(geo.begin(), geo.end(), [](const auto &a, const auto &b) { return a.name < b.name; }));

	CHECK_THROWS_AS(parse_geo("not json"), SchemaError);
	CHECK_THROWS_AS(parse_geo(R"({"type":"Feature"})"), SchemaError);
	CHECK_THROWS_AS(parse_geo(geo_with([](Json &j) { j["features"].erase(j["features"].begin()); })), SchemaError);
	CHECK_THROWS_AS(parse_geo(geo_with([](Json &j) { j["features"][0]["properties"].erase("NOMBDEP"); })),
	                SchemaError);
	CHECK_THROWS_AS(parse_geo(geo_with([](Json &j) { j["features"][0]["properties"]["NOMBDEP"] = "NARNIA"; })),
	                SchemaError);
	CHECK_THROWS_AS(parse_geo(geo_with([](Json &j) {
		                j["features"][1]["properties"]["NOMBDEP"] = j["features"][0]["properties"]["NOMBDEP"];
	                })),
	                SchemaError);
	CHECK_THROWS_AS(parse_geo(geo_with([](Json &j) { j["features"][0]["geometry"]["type"] = "Point"; })), SchemaError);
	CHECK_NOTHROW(parse_geo(geo_with([](Json &j) { j["features"][0]["properties"]["NOMBDEP"] = "amazonas "; })));
}
