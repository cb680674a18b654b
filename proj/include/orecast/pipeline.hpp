#pragma once

#include "orecast/arima.hpp"
#include "orecast/diagnostics.hpp"
#include "orecast/ingest.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orecast::pipeline {

enum class Level { AnnualTotal, Mineral, Department };
enum class ModelChoice { AutoArima, StateSpace, Best };

std::string to_string(Level level);
std::string to_string(ModelChoice model);
/// Accepts "annual", "AnnualTotal", "mineral", "department" in any case.
/// Throws ParamError (field "level").
Level parse_level(std::string_view s);
/// Accepts "auto_arima"/"arima"/"AutoArima", "state_space"/"StateSpace",
/// "best". Throws ParamError (field "model").
ModelChoice parse_model(std::string_view s);

inline constexpr int kAnnualHorizon = 5;
inline constexpr int kMonthlyHorizon = 3;

struct ForecastRequest {
	Level level = Level::AnnualTotal;
	/// Mineral for AnnualTotal and Mineral, department for Department.
	std::string target;
	/// Mineral filter for Department requests.
	std::optional<std::string> mineral;
	std::optional<int> horizon;
	ModelChoice model = ModelChoice::AutoArima;
	double confidence = 0.95;
	std::uint64_t seed = 42;
	bool bootstrap = false;
	int replicates = 1000;
	double alpha = 0.05;

	/// Throws ParamError / HorizonError for out-of-range fields.
	void validate() const;
	int resolved_horizon() const;
};

struct Dataset {
	std::vector<ingest::ProductionRecord> monthly;
	ingest::AnnualData annual;
};

struct SeriesSummary {
	std::size_t n = 0;
	CalendarPoint start;
	CalendarPoint end;
	Frequency frequency = Frequency::Annual;
	std::string unit;
	std::vector<double> values;
};

struct FitSummary {
	/// "arima" or "statespace".
	std::string family;
	/// "ARIMA(p,d,q)", "LocalLevel" or "LocalTrend".
	std::string model;
	std::optional<arima::ArimaSpec> order;
	double c = 0.0;
	std::vector<double> phi;
	std::vector<double> theta;
	double sigma2 = 0.0;
	std::vector<double> q_variances;
	double r_variance = 0.0;
	double loglik = 0.0;
	double aic = 0.0;
	std::size_t n_effective = 0;
};

struct PipelineResult {
	/// The request with its horizon resolved.
	ForecastRequest request;
	SeriesSummary series;
	FitSummary fit;
	diagnostics::DiagnosticsReport diagnostics;
	arima::ForecastResult forecast;
	std::optional<diagnostics::BootstrapForecast> bootstrap;
	std::vector<std::string> notes;
};

FitSummary summarize(const arima::ArimaFit &fit);
FitSummary summarize(const statespace::StateSpaceFit &fit);
SeriesSummary summarize(const TimeSeries &s);

/// Exact log density of the first k (1 or 2) observations of a d = 0
/// fit under its stationary marginal. Subtracting it from the fit's
/// log-likelihood conditions on the points a diffuse structural prior
/// absorbs. Throws ParamError for other k or d.
double arma_head_loglik(const arima::ArimaFit &fit, std::size_t k);

/// Annual series for `mineral`. Leading and trailing gaps are trimmed,
/// interior gaps linearly interpolated (each noted in `notes`).
TimeSeries annual_series(const ingest::AnnualData &annual, std::string_view mineral,
                         std::vector<std::string> *notes = nullptr);

/// The series a request resolves to. Throws SelectionError.
TimeSeries resolve_series(const ForecastRequest &request, const Dataset &data,
                          std::vector<std::string> *notes = nullptr);

PipelineResult run_forecast(const ForecastRequest &request, const Dataset &data);

/// Fit and diagnostics only; the forecast part of the result is empty.
PipelineResult run_diagnostics(const ForecastRequest &request, const Dataset &data);

} // namespace orecast::pipeline
