#include "orecast/arima.hpp"
#include "orecast/diagnostics.hpp"
#include "orecast/error.hpp"
#include "orecast/ingest.hpp"
#include "orecast/json.hpp"
#include "orecast/pipeline.hpp"
#include "orecast/series.hpp"
#include "orecast/service.hpp"
#include "orecast/statespace.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>

namespace py = pybind11;
using namespace orecast;

namespace {

// Values cross the boundary as JSON so Python sees the same field names as the HTTP API.
py::object to_python(const Json &j) { return py::module_::import("json").attr("loads")(j.dump()); }

TimeSeries make_series(std::vector<double> values, int start_year, int start_month, const std::string &frequency,
                       const std::string &unit) {
	const auto freq = frequency == "monthly" ? Frequency::Monthly : Frequency::Annual;
	if (frequency != "monthly" && frequency != "annual") {
		throw ParamError("frequency must be 'annual' or 'monthly'", "frequency");
	}
	return TimeSeries(std::move(values), {start_year, start_month}, freq, unit);
}

class PyService {
public:
	explicit PyService(service::Config config) {
		config.validate();
		service_ = std::make_unique<service::Service>(service::load_state(config), config);
	}

	py::tuple get(const std::string &path, const std::optional<py::dict> &query) const {
		service::Query q;
		if (query) {
			for (const auto &[k, v] : *query) {
				if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
					for (const auto &item : v) {
						q.emplace(py::str(k), py::str(item));
					}
				} else {
					q.emplace(py::str(k), py::str(v));
				}
			}
		}
		service::Response r;
		{
			py::gil_scoped_release release;
			r = service_->get(path, q);
		}
		return py::make_tuple(r.status, r.body);
	}

	std::size_t cached() const { return service_->cached(); }

private:
	std::unique_ptr<service::Service> service_;
};

} // namespace

PYBIND11_MODULE(_core, m) {
	m.doc() = "Native core of orecast";

	static py::exception<Error> error_type(m, "OrecastError", PyExc_ValueError);
	py::register_exception_translator([](std::exception_ptr p) {
		try {
			if (p) {
				std::rethrow_exception(p);
			}
		} catch (const Error &e) {
			py::object err = py::handle(error_type.ptr())(e.what());
			err.attr("code") = e.code();
			err.attr("field") = e.field().empty() ? py::none() : py::object(py::str(e.field()));
			PyErr_SetObject(error_type.ptr(), err.ptr());
		}
	});

	m.def(
	    "difference",
	    [](const std::vector<double> &values, int d) { return series::difference(values, d); }, py::arg("values"),
	    py::arg("d"), "Applies d first differences.");
	m.def(
	    "inverse_difference",
	    [](const std::vector<double> &diffed, const std::vector<double> &anchors, int d) {
		    return series::inverse_difference(diffed, anchors, d);
	    },
	    py::arg("diffed"), py::arg("anchors"), py::arg("d"),
	    "Undoes d differences given the d values preceding the block; returns the reconstructed block.");

	m.def(
	    "fit_arima",
	    [](std::vector<double> values, int p, int d, int q) {
		    const auto fit = arima::fit_arima(TimeSeries(std::move(values)), {p, d, q});
		    return to_python(Json(pipeline::summarize(fit)));
	    },
	    py::arg("values"), py::arg("p"), py::arg("d"), py::arg("q"));
	m.def(
	    "auto_arima",
	    [](std::vector<double> values) {
		    const auto fit = arima::auto_arima(TimeSeries(std::move(values)));
		    return to_python(Json(pipeline::summarize(fit)));
	    },
	    py::arg("values"));
	m.def(
	    "forecast",
	    [](std::vector<double> values, std::optional<std::tuple<int, int, int>> order, int horizon, double level,
	       int start_year, int start_month, const std::string &frequency, const std::string &unit) {
		    auto series = make_series(std::move(values), start_year, start_month, frequency, unit);
		    const auto fit = order ? arima::fit_arima(series, {std::get<0>(*order), std::get<1>(*order),
		                                                       std::get<2>(*order)})
		                           : arima::auto_arima(series);
		    Json out{{"fit", pipeline::summarize(fit)}, {"forecast", arima::forecast_arima(fit, horizon, level)}};
		    return to_python(out);
	    },
	    py::arg("values"), py::arg("order") = py::none(), py::arg("horizon") = 5, py::arg("level") = 0.95,
	    py::arg("start_year") = 2000, py::arg("start_month") = 1, py::arg("frequency") = "annual",
	    py::arg("unit") = "", "Fits ARIMA (auto_arima when order is None) and forecasts.");
	m.def(
	    "fit_structural",
	    [](std::vector<double> values, const std::string &kind) {
		    const auto k = kind == "LocalTrend" ? statespace::Kind::LocalTrend : statespace::Kind::LocalLevel;
		    if (kind != "LocalTrend" && kind != "LocalLevel") {
			    throw ParamError("kind must be 'LocalLevel' or 'LocalTrend'", "kind");
		    }
		    return to_python(Json(pipeline::summarize(statespace::fit_structural(TimeSeries(std::move(values)), k))));
	    },
	    py::arg("values"), py::arg("kind") = "LocalLevel");

	m.def(
	    "ljung_box",
	    [](const std::vector<double> &residuals, int h, int fitted_params) {
		    return to_python(Json(diagnostics::ljung_box(residuals, h, fitted_params)));
	    },
	    py::arg("residuals"), py::arg("h"), py::arg("fitted_params") = 0);
	m.def(
	    "shapiro_wilk",
	    [](const std::vector<double> &sample) { return to_python(Json(diagnostics::shapiro_wilk(sample))); },
	    py::arg("sample"));

	m.def(
	    "clean_monthly",
	    [](const std::string &text, int k) {
		    auto parsed = ingest::parse_monthly(text);
		    auto named = ingest::normalize_names(std::move(parsed.records));
		    auto imputed = ingest::knn_impute(std::move(named.records), k);
		    auto report = parsed.report;
		    report.merge(named.report);
		    report.merge(imputed.report);
		    return py::make_tuple(ingest::write_monthly(imputed.records), to_python(Json(report)));
	    },
	    py::arg("text"), py::arg("k") = 5,
	    "Parses, normalizes and imputes a monthly table. Returns (cleaned CSV text, report).");

	py::class_<service::Config>(m, "Config")
	    .def(py::init([] { return service::Config::defaults(); }))
	    .def_readwrite("monthly_path", &service::Config::monthly_path)
	    .def_readwrite("annual_path", &service::Config::annual_path)
	    .def_readwrite("geo_path", &service::Config::geo_path)
	    .def_readwrite("host", &service::Config::host)
	    .def_readwrite("port", &service::Config::port)
	    .def_readwrite("k", &service::Config::k)
	    .def_readwrite("alpha", &service::Config::alpha)
	    .def_readwrite("cache_size", &service::Config::cache_size);

	py::class_<PyService>(m, "Service")
	    .def(py::init<service::Config>(), py::arg("config") = service::Config::defaults())
	    .def("get", &PyService::get, py::arg("path"), py::arg("query") = py::none(),
	         "Handles a GET request; returns (status, JSON body text).")
	    .def_property_readonly("cached", &PyService::cached);
}
