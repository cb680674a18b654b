#pragma once

#include <functional>
#include <span>
#include <vector>

namespace orecast::optim {

struct NelderMeadOptions {
	/// Stop when (f_worst - f_best) <= rel_tol * (|f_best| + rel_tol).
	double rel_tol = 1e-8;
	int max_evaluations = 2000;
	/// Initial simplex edge along each axis.
	double initial_step = 0.1;
	/// Fresh simplexes built around the optimum after convergence; guards
	/// against collapse onto a non-stationary point.
	int restarts = 1;
};

struct NelderMeadResult {
	std::vector<double> x;
	double value = 0.0;
	int evaluations = 0;
	bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free minimization. Non-finite objective values are treated
/// as +infinity so callers may signal infeasible points that way.
NelderMeadResult nelder_mead(const Objective &f, std::vector<double> x0, const NelderMeadOptions &opts = {});

} // namespace orecast::optim
