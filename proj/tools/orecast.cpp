// orecast: command-line front end for ingestion, forecasting, diagnostics,
// charts and the HTTP service.

#include "orecast/error.hpp"
#include "orecast/json.hpp"
#include "orecast/service.hpp"
#include "orecast/text.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace orecast;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kInvalid = 2;
constexpr int kUsage = 64;

void print(const Json &j) { std::cout << j.dump(2, ' ', false, Json::error_handler_t::replace) << '\n'; }

void print_error(const Error &e) {
	std::cerr << error_json(e).dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
}

bool is_data_error(const Error &e) {
	return e.code() == "SchemaError" || e.code() == "EncodingError" || e.code() == "DuplicateYearError";
}

struct DataOptions {
	service::Config config = service::Config::defaults();

	void add(CLI::App &cmd) {
		cmd.add_option("--monthly", config.monthly_path, "Monthly production CSV")->envname("ORECAST_MONTHLY");
		cmd.add_option("--annual", config.annual_path, "Annual production CSV")->envname("ORECAST_ANNUAL");
		cmd.add_option("--k", config.k, "Neighbours for k-NN imputation")->envname("ORECAST_K");
		cmd.add_option("--alpha", config.alpha, "Significance level for residual tests")->envname("ORECAST_ALPHA");
	}
};

struct RequestOptions {
	std::string level = "annual";
	std::string target;
	std::optional<std::string> mineral;
	std::optional<int> horizon;
	std::string model = "auto_arima";
	double confidence = 0.95;
	std::uint64_t seed = 42;
	bool bootstrap = false;
	int replicates = 1000;

	void add(CLI::App &cmd, bool forecast) {
		cmd.add_option("--level", level, "annual, mineral or department")->capture_default_str();
		cmd.add_option("--target", target, "Mineral (annual, mineral) or department name")->required();
		cmd.add_option("--mineral", mineral, "Mineral filter for department requests");
		cmd.add_option("--model", model, "auto_arima, state_space or best")->capture_default_str();
		if (forecast) {
			cmd.add_option("--horizon", horizon, "Forecast steps (default: annual 5, monthly 3)");
			cmd.add_option("--confidence", confidence, "Interval level in (0, 1)")->capture_default_str();
			cmd.add_option("--seed", seed, "Bootstrap seed")->capture_default_str();
			cmd.add_flag("--bootstrap", bootstrap, "Add residual-bootstrap intervals");
			cmd.add_option("--replicates", replicates, "Bootstrap replicates")->capture_default_str();
		}
	}

	pipeline::ForecastRequest build(double alpha) const {
		pipeline::ForecastRequest r;
		r.level = pipeline::parse_level(level);
		r.target = target;
		r.mineral = mineral;
		r.horizon = horizon;
		r.model = pipeline::parse_model(model);
		r.confidence = confidence;
		r.seed = seed;
		r.bootstrap = bootstrap;
		r.replicates = replicates;
		r.alpha = alpha;
		return r;
	}
};

int cmd_ingest(const std::filesystem::path &input, const std::filesystem::path &output, int k, char delimiter) {
	auto parsed = ingest::parse_monthly(ingest::read_file(input));
	auto named = ingest::normalize_names(parsed.records);
	auto imputed = ingest::knn_impute(named.records, k);
	auto report = parsed.report;
	report.merge(named.report);
	report.merge(imputed.report);
	std::ofstream out(output, std::ios::binary);
	if (!out) {
		throw IOError("cannot write " + output.string(), "output");
	}
	out << ingest::write_monthly(imputed.records, delimiter);
	if (!out.flush()) {
		throw IOError("failed writing " + output.string(), "output");
	}
	print(Json{{"output", output.string()}, {"records", imputed.records.size()}, {"report", report}});
	return kOk;
}

int cmd_validate(const std::filesystem::path &input, std::string kind) {
	const auto src = ingest::read_file(input);
	if (kind == "auto") {
		const auto first = text::trim(std::string_view(src).substr(0, src.find_first_of(",;\n")));
		kind = text::normalize_name(first).ends_with("ANO") ? "annual" : "monthly";
	}
	Json out{{"file", input.string()}, {"kind", kind}};
	try {
		if (kind == "annual") {
			const auto data = ingest::parse_annual(src);
			out["valid"] = true;
			out["records"] = data.records.size();
			out["report"] = data.report;
		} else {
			const auto data = ingest::parse_monthly(src);
			out["valid"] = true;
			out["records"] = data.records.size();
			out["report"] = data.report;
		}
		print(out);
		return kOk;
	} catch (const Error &e) {
		if (!is_data_error(e)) {
			throw;
		}
		out["valid"] = false;
		out["error"] = error_json(e);
		out["report"] = ingest::CleaningReport{};
		print(out);
		return kInvalid;
	}
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Mining production analytics and forecasting"};
	app.require_subcommand(1);

	std::filesystem::path input;
	std::filesystem::path output;
	int ingest_k = 5;
	std::string delim = ",";
	auto *ingest_cmd = app.add_subcommand("ingest", "Parse, clean and impute a monthly CSV; write the normalized CSV");
	ingest_cmd->add_option("input", input, "Monthly production CSV")->required()->check(CLI::ExistingFile);
	ingest_cmd->add_option("-o,--output", output, "Normalized CSV to write")->required();
	ingest_cmd->add_option("--k", ingest_k, "Neighbours for k-NN imputation")->capture_default_str();
	ingest_cmd->add_option("--delimiter", delim, "Output delimiter")->check(CLI::IsMember({",", ";"}));

	std::string kind = "auto";
	auto *validate_cmd = app.add_subcommand("validate", "Check a monthly or annual CSV and print its cleaning report");
	validate_cmd->add_option("input", input, "CSV file")->required()->check(CLI::ExistingFile);
	validate_cmd->add_option("--kind", kind, "monthly, annual or auto")
	    ->check(CLI::IsMember({"auto", "monthly", "annual"}))
	    ->capture_default_str();

	DataOptions forecast_data;
	RequestOptions forecast_req;
	auto *forecast_cmd = app.add_subcommand("forecast", "Fit, diagnose and forecast; prints the result as JSON");
	forecast_data.add(*forecast_cmd);
	forecast_req.add(*forecast_cmd, true);

	DataOptions diagnose_data;
	RequestOptions diagnose_req;
	auto *diagnose_cmd = app.add_subcommand("diagnose", "Fit a model and print residual diagnostics as JSON");
	diagnose_data.add(*diagnose_cmd);
	diagnose_req.add(*diagnose_cmd, false);

	DataOptions chart_data;
	std::string chart_kind;
	std::string group_by = "department";
	service::ChartQuery chart_query;
	auto *charts_cmd = app.add_subcommand("charts", "Print bar, pie or frequency-polygon series as JSON");
	chart_data.add(*charts_cmd);
	charts_cmd->add_option("kind", chart_kind, "bar, pie or polygon")
	    ->required()
	    ->check(CLI::IsMember({"bar", "pie", "polygon"}));
	charts_cmd->add_option("--group-by", group_by, "mineral, department, year, stratum or stage")->capture_default_str();
	charts_cmd->add_option("--mineral", chart_query.mineral, "Mineral filter");
	charts_cmd->add_option("--department", chart_query.department, "Department filter");
	charts_cmd->add_option("--year", chart_query.year, "Year filter");
	charts_cmd->add_option("--bins", chart_query.bins, "Polygon bin count (default: Sturges)");

	DataOptions serve_data;
	std::optional<std::filesystem::path> static_dir;
	auto *serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
	serve_data.add(*serve_cmd);
	auto &cfg = serve_data.config;
	serve_cmd->add_option("--geo", cfg.geo_path, "Department boundaries (GeoJSON, NOMBDEP)")->envname("ORECAST_GEO");
	serve_cmd->add_option("--host", cfg.host, "Listen address")->envname("ORECAST_HOST")->capture_default_str();
	serve_cmd->add_option("--port", cfg.port, "Listen port")->envname("ORECAST_PORT")->capture_default_str();
	serve_cmd->add_option("--cache-size", cfg.cache_size, "Cached forecast responses")
	    ->envname("ORECAST_CACHE_SIZE")
	    ->capture_default_str();
	serve_cmd->add_option("--static", static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e);
	} catch (const CLI::CallForAllHelp &e) {
		return app.exit(e);
	} catch (const CLI::CallForVersion &e) {
		return app.exit(e);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return kUsage;
	}

	try {
		if (*ingest_cmd) {
			return cmd_ingest(input, output, ingest_k, delim[0]);
		}
		if (*validate_cmd) {
			return cmd_validate(input, kind);
		}
		if (*forecast_cmd) {
			const auto st = service::load_state(forecast_data.config, false);
			print(Json(pipeline::run_forecast(forecast_req.build(forecast_data.config.alpha), st.data)));
			return kOk;
		}
		if (*diagnose_cmd) {
			const auto st = service::load_state(diagnose_data.config, false);
			print(Json(pipeline::run_diagnostics(diagnose_req.build(diagnose_data.config.alpha), st.data)));
			return kOk;
		}
		if (*charts_cmd) {
			const auto st = service::load_state(chart_data.config, false);
			chart_query.group_by = analytics::parse_group_by(group_by);
			const auto k = chart_kind == "bar"   ? analytics::ChartKind::Bar
			               : chart_kind == "pie" ? analytics::ChartKind::Pie
			                                     : analytics::ChartKind::FrequencyPolygon;
			print(service::charts_json(st.data.monthly, k, chart_query));
			return kOk;
		}
		if (*serve_cmd) {
			cfg.static_dir = static_dir;
			const service::Service svc(service::load_state(cfg), cfg);
			std::cerr << "orecast: " << svc.state().data.monthly.size() << " monthly records, "
			          << svc.state().data.annual.records.size() << " annual rows; listening on http://" << cfg.host << ':'
			          << cfg.port << '\n';
			service::serve(svc);
			return kOk;
		}
	} catch (const Error &e) {
		if (*serve_cmd && is_data_error(e)) {
			std::cerr << Json{{"error", error_json(e)}, {"report", ingest::CleaningReport{}}}.dump(2) << '\n';
		} else {
			print_error(e);
		}
		return is_data_error(e) ? kInvalid : kRuntime;
	} catch (const std::exception &e) {
		std::cerr << Json{{"code", "InternalError"}, {"message", e.what()}, {"field", nullptr}}.dump() << '\n';
		return kRuntime;
	}
	return kUsage;
}
