#pragma once

#include "orecast/arima.hpp"
#include "orecast/kalman.hpp"
#include "orecast/series.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace orecast::statespace {

enum class Kind { LocalLevel, LocalTrend };

std::string to_string(Kind kind);

/// Optional control term B u(t). `inputs` aligns with the observations.
struct Control {
	Eigen::VectorXd loading; // B
	std::vector<double> inputs;
};

struct StateSpaceSpec {
	Kind kind = Kind::LocalLevel;
	std::optional<Control> control;

	Eigen::Index state_dim() const { return kind == Kind::LocalLevel ? 1 : 2; }
	/// A: [1] for the local level, [[1,1],[0,1]] for the local trend.
	Eigen::MatrixXd transition() const;
	/// C: [1] or [1,0].
	Eigen::VectorXd observation() const;
	/// Observations reserved for the diffuse start; excluded from the likelihood.
	std::size_t diffuse_count() const { return static_cast<std::size_t>(state_dim()); }
};

struct Variances {
	/// Process-noise variance per state component (level, then slope).
	std::vector<double> q;
	/// Observation-noise variance.
	double r = 0.0;
};

struct FilteredState {
	Eigen::VectorXd mean;
	Eigen::MatrixXd cov;
};

struct StateSpaceFit {
	StateSpaceSpec spec;
	std::vector<double> q_variances;
	double r_variance = 0.0;
	double loglik = 0.0;
	double aic = 0.0;
	std::vector<FilteredState> filtered_states;
	/// Standardized one-step innovations after the diffuse start.
	TimeSeries residuals;
	TimeSeries series;
};

kalman::LinearModel make_model(const StateSpaceSpec &spec, const Variances &v);

/// One predict-then-update step. A gap (nullopt) only predicts.
kalman::StepResult kalman_step(const Eigen::VectorXd &prior_mean, const Eigen::MatrixXd &prior_cov,
                               std::optional<double> observation, const StateSpaceSpec &spec, const Variances &v,
                               double control_input = 0.0);

/// Prediction-error log-likelihood with a finite-diffuse start
/// (prior variance 1e7 times the sample variance), excluding the first
/// `spec.diffuse_count()` observations.
double structural_loglik(std::span<const double> y, const StateSpaceSpec &spec, const Variances &v);

/// Maximizes the likelihood over log-variances with the simplex optimizer.
StateSpaceFit fit_structural(const TimeSeries &series, Kind kind, const arima::FitOptions &opts = {});

/// `future_control` supplies u(t) for the forecast steps when the model
/// carries a control loading.
arima::ForecastResult forecast_structural(const StateSpaceFit &fit, int horizon, double level = 0.95,
                                          std::span<const double> future_control = {});

/// Minimum series length for `kind`.
std::size_t min_length(Kind kind);

bool is_symmetric_psd(const Eigen::MatrixXd &m, double tol = 1e-10);

} // namespace orecast::statespace
