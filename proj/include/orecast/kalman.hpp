#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace orecast::kalman {

/// Time-invariant linear Gaussian model
///   x(t) = A x(t-1) + B u(t) + w(t),  w ~ N(0, Q)
///   y(t) = C x(t) + v(t),             v ~ N(0, r)
struct LinearModel {
	Eigen::MatrixXd transition;  // A
	Eigen::VectorXd observation; // C, stored as a column
	Eigen::MatrixXd process_cov; // Q
	double observation_var = 0.0;
	/// B; empty when the model has no control input.
	Eigen::VectorXd control;
};

struct StepResult {
	Eigen::VectorXd mean;
	Eigen::MatrixXd cov;
	/// Absent when the observation was a gap.
	std::optional<double> innovation;
	std::optional<double> innovation_var;
};

/// Predict from the previous posterior, then update with `y`. A gap skips
/// the update. Throws SingularError when the innovation variance is
/// numerically zero.
StepResult step(const LinearModel &model, const Eigen::VectorXd &prior_mean, const Eigen::MatrixXd &prior_cov,
                std::optional<double> y, double control_input = 0.0);

struct FilterOptions {
	/// Leading innovations left out of the likelihood sums (diffuse part).
	std::size_t skip = 0;
	bool store_states = false;
	/// Freeze gain and covariance once the predicted covariance stops
	/// changing.
	bool steady_state = true;
	/// Control inputs aligned with observations; empty means zero.
	std::span<const double> control = {};
};

struct FilterResult {
	std::vector<double> innovations;     // v(t)
	std::vector<double> innovation_vars; // F(t)
	double sum_log_f = 0.0;              // over non-skipped steps
	double sum_sq = 0.0;                 // sum v^2 / F over non-skipped steps
	std::size_t used = 0;                // count of non-skipped steps
	Eigen::VectorXd final_mean;
	Eigen::MatrixXd final_cov;
	std::vector<Eigen::VectorXd> means;
	std::vector<Eigen::MatrixXd> covs;
};

/// Runs `step` over all observations starting from the posterior at t = 0.
FilterResult filter(const LinearModel &model, const Eigen::VectorXd &mean0, const Eigen::MatrixXd &cov0,
                    std::span<const double> y, const FilterOptions &opts = {});

/// Gaussian log-likelihood from the prediction-error decomposition with
/// known scale.
double loglik(const FilterResult &res);

} // namespace orecast::kalman
