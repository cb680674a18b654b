#include "orecast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace orecast::optim {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Counted {
	const Objective &f;
	int evaluations = 0;

	double operator()(std::span<const double> x) {
		++evaluations;
		const double v = f(x);
		return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
	}
};

// One simplex run. Returns true when the spread criterion was met.
bool run_simplex(Counted &eval, std::vector<double> &best_x, double &best_f, const NelderMeadOptions &opts) {
	const std::size_t n = best_x.size();
	std::vector<std::vector<double>> pts(n + 1, best_x);
	std::vector<double> vals(n + 1);
	vals[0] = best_f;
	for (std::size_t i = 0; i < n; ++i) {
		const double step = opts.initial_step * std::max(1.0, std::abs(best_x[i]));
		pts[i + 1][i] += step;
		vals[i + 1] = eval(pts[i + 1]);
	}

	std::vector<std::size_t> order(n + 1);
	std::vector<double> centroid(n), trial(n), trial2(n);
	bool converged = false;

	while (true) {
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
		const std::size_t lo = order.front();
		const std::size_t hi = order.back();
		const std::size_t second = order[n - 1];

		const double spread = vals[hi] - vals[lo];
		if (std::isfinite(vals[hi]) && spread <= opts.rel_tol * (std::abs(vals[lo]) + opts.rel_tol)) {
			converged = true;
			break;
		}
		if (eval.evaluations >= opts.max_evaluations) {
			break;
		}

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == hi) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				centroid[j] += pts[i][j];
			}
		}
		for (double &c : centroid) {
			c /= static_cast<double>(n);
		}

		for (std::size_t j = 0; j < n; ++j) {
			trial[j] = centroid[j] + kReflect * (centroid[j] - pts[hi][j]);
		}
		const double f_reflect = eval(trial);

		if (f_reflect < vals[lo]) {
			for (std::size_t j = 0; j < n; ++j) {
				trial2[j] = centroid[j] + kExpand * (trial[j] - centroid[j]);
			}
			const double f_expand = eval(trial2);
			if (f_expand < f_reflect) {
				pts[hi] = trial2;
				vals[hi] = f_expand;
			} else {
				pts[hi] = trial;
				vals[hi] = f_reflect;
			}
			continue;
		}
		if (f_reflect < vals[second]) {
			pts[hi] = trial;
			vals[hi] = f_reflect;
			continue;
		}

		const bool outside = f_reflect < vals[hi];
		for (std::size_t j = 0; j < n; ++j) {
			trial2[j] = outside ? centroid[j] + kContract * (trial[j] - centroid[j])
			                    : centroid[j] + kContract * (pts[hi][j] - centroid[j]);
		}
		const double f_contract = eval(trial2);
		if (f_contract < std::min(f_reflect, vals[hi])) {
			pts[hi] = trial2;
			vals[hi] = f_contract;
			continue;
		}

		for (std::size_t i = 0; i <= n; ++i) {
			if (i == lo) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				pts[i][j] = pts[lo][j] + kShrink * (pts[i][j] - pts[lo][j]);
			}
			vals[i] = eval(pts[i]);
		}
	}

	const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
	best_x = pts[best];
	best_f = vals[best];
	return converged;
}

} // namespace

NelderMeadResult nelder_mead(const Objective &f, std::vector<double> x0, const NelderMeadOptions &opts) {
	Counted eval{f};
	NelderMeadResult res;
	res.x = std::move(x0);
	res.value = eval(res.x);
	if (res.x.empty()) {
		res.converged = true;
		res.evaluations = eval.evaluations;
		return res;
	}

	res.converged = run_simplex(eval, res.x, res.value, opts);
	for (int r = 0; r < opts.restarts && res.converged; ++r) {
		const double before = res.value;
		res.converged = run_simplex(eval, res.x, res.value, opts);
		if (before - res.value <= opts.rel_tol * (std::abs(res.value) + opts.rel_tol)) {
			break;
		}
	}
	res.evaluations = eval.evaluations;
	return res;
}

} // namespace orecast::optim
