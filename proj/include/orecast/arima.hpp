#pragma once

#include "orecast/series.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace orecast::arima {

constexpr int kMaxP = 5;
constexpr int kMaxD = 2;
constexpr int kMaxQ = 5;

struct ArimaSpec {
	int p = 0;
	int d = 0;
	int q = 0;

	/// Throws ParamError when an order is out of range.
	void validate() const;
	std::string to_string() const;

	bool operator==(const ArimaSpec &) const = default;
};

/// Coefficients of an ARIMA process. `c` is the intercept of the ARMA
/// recursion on the differenced scale:
///   w(t) = c + sum phi_i w(t-i) + e(t) + sum theta_j e(t-j)
struct ArimaParams {
	ArimaSpec spec;
	double c = 0.0;
	std::vector<double> phi;
	std::vector<double> theta;
	double sigma2 = 1.0;
};

struct ArimaFit {
	ArimaSpec spec;
	double c = 0.0;
	std::vector<double> phi;
	std::vector<double> theta;
	double sigma2 = 0.0;
	/// One-step prediction errors on the differenced scale, aligned with
	/// the differenced series.
	TimeSeries residuals;
	double loglik = 0.0;
	double aic = 0.0;
	std::size_t n_effective = 0;
	/// The undifferenced series the model was fitted to.
	TimeSeries series;

	/// Process mean of the differenced series, c / (1 - sum phi).
	double process_mean() const;
};

struct ForecastResult {
	int horizon = 0;
	std::vector<double> mean;
	std::vector<double> lower;
	std::vector<double> upper;
	double level = 0.95;
	std::string unit;
	/// Calendar position of the first forecast step.
	CalendarPoint start;
	Frequency frequency = Frequency::Annual;
};

struct FitOptions {
	double rel_tol = 1e-8;
	int max_evaluations = 2000;
};

/// Minimum differenced length for `spec`: max(8, 3(p+q)+2).
std::size_t min_length(const ArimaSpec &spec);

/// Exact Gaussian maximum likelihood via the Kalman filter on the ARMA
/// state-space form. For d = 0 the model is fitted to the mean-adjusted
/// series and c is reported as mean * (1 - sum phi); for d >= 1 no mean
/// term is fitted.
ArimaFit fit_arima(const TimeSeries &series, const ArimaSpec &spec, const FitOptions &opts = {});

/// Chooses d by the variance/lag-1 rule, then searches p, q in 0..5 with
/// p + q <= 6 for minimum AIC.
ArimaFit auto_arima(const TimeSeries &series, const FitOptions &opts = {});

/// The differencing order auto_arima would use.
int select_differencing(std::span<const double> values);

ForecastResult forecast_arima(const ArimaFit &fit, int horizon, double level = 0.95);

/// Draws n values after a 200-point burn-in. Deterministic for a seed.
TimeSeries simulate_arima(const ArimaParams &params, std::size_t n, std::uint64_t seed,
                          CalendarPoint start = {2000, 1}, Frequency freq = Frequency::Annual);

/// Exact log-likelihood of a zero-mean ARMA(p, q) with known sigma2.
double arma_loglik(std::span<const double> w, std::span<const double> phi, std::span<const double> theta,
                   double sigma2);

/// MA(infinity) weights psi_0..psi_{count-1} of phi(B)(1-B)^d x = theta(B) e.
std::vector<double> psi_weights(std::span<const double> phi, std::span<const double> theta, int d, int count);

/// Paths on the original scale for the given future shocks (length =
/// horizon). Zero shocks give the point forecast.
std::vector<double> project(const ArimaFit &fit, std::span<const double> shocks);

/// True when all roots of 1 - sum a_i z^i lie outside the unit circle by
/// more than `margin`.
bool roots_outside_unit_circle(std::span<const double> a, double margin = 1e-8);

/// Maps unconstrained reals to coefficients of a stationary polynomial
/// (tanh to partial autocorrelations, then Durbin-Levinson).
std::vector<double> to_stationary(std::span<const double> raw);

/// Inverse of to_stationary for a stationary coefficient vector.
std::vector<double> from_stationary(std::span<const double> coef);

} // namespace orecast::arima
