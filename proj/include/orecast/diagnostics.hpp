#pragma once

#include "orecast/arima.hpp"
#include "orecast/series.hpp"
#include "orecast/statespace.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace orecast::diagnostics {

struct TestResult {
	double statistic = 0.0;
	double p_value = 1.0;
	/// Degrees of freedom for Ljung-Box, sample size for Shapiro-Wilk.
	int df_or_n = 0;
	std::string test_name;
};

struct BootstrapForecast {
	int horizon = 0;
	std::vector<double> mean;
	std::vector<double> lower;
	std::vector<double> upper;
	double level = 0.95;
	int replicates = 0;
	std::uint64_t seed = 0;
};

struct TestFailure {
	std::string test_name;
	std::string code;
	std::string message;
};

struct DiagnosticsReport {
	double alpha = 0.05;
	std::optional<TestResult> ljung_box;
	std::optional<TestResult> shapiro_wilk;
	/// p > alpha. False when the test could not be run.
	bool ljung_box_pass = false;
	bool shapiro_wilk_pass = false;
	std::vector<TestFailure> errors;
};

/// min(10, n / 5), but at least fitted_params + 1.
int default_lag(std::size_t n, int fitted_params);

/// Q = n (n + 2) sum_{k=1..h} r_k^2 / (n - k), chi-square with
/// h - fitted_params degrees of freedom.
TestResult ljung_box(std::span<const double> residuals, int h, int fitted_params = 0);
TestResult ljung_box(const TimeSeries &residuals, int h, int fitted_params = 0);

/// Royston's AS R94 approximation, 3 <= n <= 5000.
TestResult shapiro_wilk(std::span<const double> sample);

/// Residual-resampling forecast paths through the fitted recursion.
/// Replicate r draws from its own substream seeded by (seed, r).
BootstrapForecast bootstrap_forecast(const arima::ArimaFit &fit, int horizon, double level = 0.95,
                                     int replicates = 1000, std::uint64_t seed = 0);

/// Linear interpolation between order statistics at position (n - 1) p.
/// `sorted` must be ascending.
double percentile(std::span<const double> sorted, double p);

/// Runs both tests; failures are recorded in the report, not thrown.
DiagnosticsReport diagnose_residuals(std::span<const double> residuals, int fitted_params, double alpha = 0.05);
DiagnosticsReport diagnose(const arima::ArimaFit &fit, double alpha = 0.05);
DiagnosticsReport diagnose(const statespace::StateSpaceFit &fit, double alpha = 0.05);

} // namespace orecast::diagnostics
