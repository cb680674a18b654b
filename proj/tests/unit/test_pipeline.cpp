#include "doctest.h"

#include "orecast/error.hpp"
#include "orecast/json.hpp"
#include "orecast/pipeline.hpp"

#include <cmath>
#include <random>

using namespace orecast;
using namespace orecast::pipeline;

namespace {

ingest::ProductionRecord monthly(const std::string &mineral, const std::string &unit, const std::string &dept, int year,
                                 const std::vector<double> &values, std::size_t offset) {
	ingest::ProductionRecord r;
	r.mineral = mineral;
	r.unit = unit;
	r.department = dept;
	r.year = year;
	for (std::size_t m = 0; m < 12 && offset + m < values.size(); ++m) {
		r.months[m] = values[offset + m];
	}
	return r;
}

Dataset dataset() {
	Dataset d;
	const auto oro = arima::simulate_arima({{1, 0, 0}, 400.0, {0.6}, {}, 25.0}, 36, 5);
	const std::vector<double> v(oro.values().begin(), oro.values().end());
	for (int y = 0; y < 3; ++y) {
		d.monthly.push_back(monthly("ORO", "KG", "PUNO", 2020 + y, v, static_cast<std::size_t>(12 * y)));
	}
	// Tacna only has four months of copper.
	d.monthly.push_back(monthly("COBRE", "TMF", "TACNA", 2022, {10, 11, 12, 13}, 0));

	std::string csv = "AÑO,COBRE(TMF),PLATA(KG)\n";
	const auto cu = arima::simulate_arima({{0, 1, 1}, 20.0, {}, {0.3}, 100.0}, 43, 9);
	for (int i = 0; i < 43; ++i) {
		const std::string cell = (i == 10) ? "" : std::to_string(1000.0 + cu[static_cast<std::size_t>(i)]);
		csv += std::to_string(1980 + i) + "," + cell + "," + std::to_string(50.0 + i) + "\n";
	}
	d.annual = ingest::parse_annual(csv);
	return d;
}

ForecastRequest request(Level level, std::string target) {
	ForecastRequest r;
	r.level = level;
	r.target = std::move(target);
	return r;
}

} // namespace

TEST_CASE("default horizons: annual 5, monthly 3") {
	const auto data = dataset();
	const auto annual = run_forecast(request(Level::AnnualTotal, "cobre"), data);
	CHECK(annual.forecast.horizon == 5);
	CHECK(*annual.request.horizon == 5);
	CHECK(annual.forecast.unit == "TMF");
	CHECK(annual.forecast.frequency == Frequency::Annual);
	CHECK(annual.forecast.start == CalendarPoint{2023, 1});
	CHECK(annual.series.n == 43);

	const auto oro = run_forecast(request(Level::Mineral, "Oro"), data);
	CHECK(oro.series.n == 36);
	CHECK(oro.forecast.horizon == 3);
	CHECK(oro.forecast.mean.size() == 3);
	CHECK(oro.forecast.unit == "KG");
	CHECK(oro.forecast.start == CalendarPoint{2023, 1});

	auto dept = request(Level::Department, "Puno");
	dept.horizon = 7;
	CHECK(run_forecast(dept, data).forecast.horizon == 7);
}

TEST_CASE("interior annual gaps are interpolated") {
	const auto data = dataset();
	std::vector<std::string> notes;
	const auto s = annual_series(data.annual, "COBRE", &notes);
	REQUIRE(s.size() == 43);
	CHECK(s[10] == doctest::Approx((s[9] + s[11]) / 2.0).epsilon(1e-12));
	REQUIRE(notes.size() == 1);
	CHECK(notes[0].find("1990") != std::string::npos);
}

TEST_CASE("selection and length errors") {
	const auto data = dataset();
	try {
		run_forecast(request(Level::Department, "Tacna"), data);
		FAIL("expected TooShortError");
	} catch (const TooShortError &e) {
		CHECK(e.actual() == 4);
		CHECK(e.required() > 4);
	}
	CHECK_THROWS_AS(run_forecast(request(Level::Mineral, "PLATINO"), data), SelectionError);
	CHECK_THROWS_AS(run_forecast(request(Level::Department, "Atlantis"), data), SelectionError);
	CHECK_THROWS_AS(run_forecast(request(Level::Department, "Lima"), data), SelectionError);
	CHECK_THROWS_AS(run_forecast(request(Level::AnnualTotal, "ZINC"), data), SelectionError);

	auto bad = request(Level::Mineral, "ORO");
	bad.confidence = 1.0;
	CHECK_THROWS_AS(run_forecast(bad, data), ParamError);
	bad = request(Level::Mineral, "ORO");
	bad.horizon = 0;
	CHECK_THROWS_AS(run_forecast(bad, data), HorizonError);
	CHECK_THROWS_AS(parse_level("weekly"), ParamError);
	CHECK(parse_model("state_space") == ModelChoice::StateSpace);
	CHECK(parse_level("annual") == Level::AnnualTotal);
}

TEST_CASE("identical requests give byte-identical JSON (property)") {
	const auto data = dataset();
	for (Level level : {Level::AnnualTotal, Level::Mineral, Level::Department}) {
		for (ModelChoice model : {ModelChoice::AutoArima, ModelChoice::StateSpace, ModelChoice::Best}) {
			auto req = request(level, level == Level::AnnualTotal ? "COBRE" : level == Level::Mineral ? "ORO" : "PUNO");
			req.model = model;
			req.bootstrap = true;
			req.replicates = 200;
			const auto a = Json(run_forecast(req, data)).dump();
			const auto b = Json(run_forecast(req, data)).dump();
			REQUIRE(a == b);
			const auto j = Json::parse(a);
			REQUIRE(j["forecast"]["unit"] == j["series_used"]["unit"]);
			REQUIRE(j["forecast"]["horizon"] == j["request"]["horizon"]);
			REQUIRE(j["diagnostics"].contains("ljung_box"));
		}
	}
}

TEST_CASE("model choice") {
	const auto data = dataset();
	auto req = request(Level::AnnualTotal, "COBRE");
	req.model = ModelChoice::StateSpace;
	const auto ss = run_forecast(req, data);
	CHECK(ss.fit.family == "statespace");
	CHECK_FALSE(ss.fit.order.has_value());

	req.model = ModelChoice::Best;
	req.bootstrap = true;
	const auto best = run_forecast(req, data);
	if (best.fit.order && best.fit.order->d > 0) {
		bool noted = false;
		for (const auto &n : best.notes) {
			noted = noted || n.find("not comparable") != std::string::npos;
		}
		CHECK(noted);
	}

	req.level = Level::Mineral;
	req.target = "ORO";
	const auto m = run_forecast(req, data);
	REQUIRE(m.fit.family == "arima");
	REQUIRE(m.fit.order->d == 0);
	bool compared = false;
	for (const auto &n : m.notes) {
		compared = compared || n.rfind("best: ARIMA", 0) == 0;
	}
	CHECK(compared);
	REQUIRE(m.bootstrap.has_value());
	CHECK(m.bootstrap->seed == 42);
	CHECK(m.bootstrap->horizon == 3);
}

TEST_CASE("run_diagnostics omits the forecast") {
	const auto data = dataset();
	const auto r = run_diagnostics(request(Level::Mineral, "ORO"), data);
	CHECK(r.forecast.horizon == 0);
	const auto j = Json(r);
	CHECK_FALSE(j.contains("forecast"));
	CHECK(j["diagnostics"]["ljung_box"]["test_name"] == "ljung_box");
}

TEST_CASE("arma_head_loglik matches the AR(1) closed form") {
	const auto base = arima::fit_arima(arima::simulate_arima({{1, 0, 0}, 0.0, {0.5}, {}, 1.0}, 30, 1), {1, 0, 0});
	for (double phi : {-0.8, 0.0, 0.5, 0.95}) {
		auto fit = base;
		fit.spec = {1, 0, 0};
		fit.phi = {phi};
		fit.sigma2 = 2.5;
		fit.c = 3.0 * (1.0 - phi);
		fit.series = TimeSeries({4.0, 1.5, 7.0});
		const double g0 = fit.sigma2 / (1.0 - phi * phi);
		const double e0 = 1.0;
		const double e1 = -1.5;
		const double one = -0.5 * (std::log(2.0 * M_PI * g0) + e0 * e0 / g0);
		const double cond = -0.5 * (std::log(2.0 * M_PI * fit.sigma2) + std::pow(e1 - phi * e0, 2) / fit.sigma2);
		CHECK(arma_head_loglik(fit, 1) == doctest::Approx(one).epsilon(1e-12));
		CHECK(arma_head_loglik(fit, 2) == doctest::Approx(one + cond).epsilon(1e-12));
	}
	auto diffed = base;
	diffed.spec = {0, 1, 0};
	diffed.series = TimeSeries({1.0, 2.0});
	CHECK_THROWS_AS(arma_head_loglik(diffed, 1), ParamError);
}
