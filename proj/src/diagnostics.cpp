#include "orecast/diagnostics.hpp"

#include "orecast/distributions.hpp"
#include "orecast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace orecast::diagnostics {

namespace {

constexpr std::size_t kMinShapiro = 3;
constexpr std::size_t kMaxShapiro = 5000;
constexpr int kMinReplicates = 100;
constexpr std::size_t kMinResiduals = 10;

template <std::size_t N> double poly(const double (&c)[N], double x) {
	double r = c[N - 1];
	for (std::size_t i = N - 1; i-- > 0;) {
		r = r * x + c[i];
	}
	return r;
}

// Coefficients for the upper half of the ordered sample, largest first.
std::vector<double> shapiro_coefficients(std::size_t n) {
	static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
	static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};

	const std::size_t n2 = n / 2;
	std::vector<double> a(n2);
	if (n == 3) {
		a[0] = std::sqrt(0.5);
		return a;
	}
	const double an = static_cast<double>(n);
	std::vector<double> m(n2);
	double summ2 = 0.0;
	for (std::size_t i = 0; i < n2; ++i) {
		m[i] = dist::normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
		summ2 += m[i] * m[i];
	}
	summ2 *= 2.0;
	const double ssumm2 = std::sqrt(summ2);
	const double rsn = 1.0 / std::sqrt(an);
	const double a1 = poly(c1, rsn) - m[0] / ssumm2;

	std::size_t i1 = 1;
	double fac = 0.0;
	if (n > 5) {
		i1 = 2;
		const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
		fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
		a[1] = a2;
	} else {
		fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
	}
	a[0] = a1;
	for (std::size_t i = i1; i < n2; ++i) {
		a[i] = -m[i] / fac;
	}
	return a;
}

double shapiro_p_value(std::size_t n, double w, double w1) {
	static constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
	static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
	static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
	static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
	static constexpr double g[] = {-2.273, 0.459};

	if (n == 3) {
		// Exact for n = 3.
		const double p = 6.0 / std::numbers::pi * (std::asin(std::sqrt(w)) - std::numbers::pi / 3.0);
		return std::clamp(p, 0.0, 1.0);
	}
	if (!(w1 > 0.0)) {
		return 1.0;
	}
	const double an = static_cast<double>(n);
	double y = std::log(w1);
	double m = 0.0;
	double s = 1.0;
	if (n <= 11) {
		const double gamma = poly(g, an);
		if (y >= gamma) {
			return 1e-19;
		}
		y = -std::log(gamma - y);
		m = poly(c3, an);
		s = std::exp(poly(c4, an));
	} else {
		const double ln = std::log(an);
		m = poly(c5, ln);
		s = std::exp(poly(c6, ln));
	}
	return std::clamp(dist::normal_sf((y - m) / s), 0.0, 1.0);
}

void record(DiagnosticsReport &report, const std::string &test, const Error &e) {
	report.errors.push_back({test, e.code(), e.what()});
}

} // namespace

int default_lag(std::size_t n, int fitted_params) {
	const int h = static_cast<int>(std::min<std::size_t>(10, n / 5));
	return std::max(h, fitted_params + 1);
}

TestResult ljung_box(std::span<const double> residuals, int h, int fitted_params) {
	const std::size_t n = residuals.size();
	if (fitted_params < 0) {
		throw ParamError("fitted parameter count must be non-negative", "fitted_params");
	}
	if (h < 1 || static_cast<std::size_t>(h) >= n) {
		throw LagError("Ljung-Box lag must lie in [1, " + std::to_string(n) + "), got " + std::to_string(h), "h");
	}
	if (h <= fitted_params) {
		throw LagError("Ljung-Box lag " + std::to_string(h) + " must exceed the fitted parameter count " +
		                   std::to_string(fitted_params),
		               "h");
	}
	const auto r = series::acf(residuals, h);
	const double nn = static_cast<double>(n);
	double sum = 0.0;
	for (std::size_t k = 0; k < r.coefficients.size(); ++k) {
		const double rk = r.coefficients[k];
		sum += rk * rk / (nn - static_cast<double>(k + 1));
	}
	const double q = nn * (nn + 2.0) * sum;
	const int df = h - fitted_params;
	return {q, std::clamp(dist::chisq_sf(q, df), 0.0, 1.0), df, "ljung_box"};
}

TestResult ljung_box(const TimeSeries &residuals, int h, int fitted_params) {
	return ljung_box(residuals.values(), h, fitted_params);
}

TestResult shapiro_wilk(std::span<const double> sample) {
	const std::size_t n = sample.size();
	if (n < kMinShapiro || n > kMaxShapiro) {
		throw SizeError("Shapiro-Wilk needs between 3 and 5000 values, got " + std::to_string(n), "sample");
	}
	std::vector<double> x(sample.begin(), sample.end());
	for (double v : x) {
		if (!std::isfinite(v)) {
			throw ParamError("Shapiro-Wilk sample contains a non-finite value", "sample");
		}
	}
	std::sort(x.begin(), x.end());
	const double range = x.back() - x.front();
	if (!(range > 0.0)) {
		throw DegenerateError("Shapiro-Wilk needs a sample with positive variance", "sample");
	}

	const auto a = shapiro_coefficients(n);
	const std::size_t n2 = n / 2;
	auto coef = [&](std::size_t i) {
		if (i < n2) {
			return -a[i];
		}
		if (i >= n - n2) {
			return a[n - 1 - i];
		}
		return 0.0;
	};

	// Squared correlation between the range-scaled data and the
	// coefficients, computed as 1 - W to keep precision near W = 1.
	const double an = static_cast<double>(n);
	double sa = 0.0;
	double sx = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		sa += coef(i);
		sx += x[i] / range;
	}
	sa /= an;
	sx /= an;
	double ssa = 0.0;
	double ssx = 0.0;
	double sax = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		const double asa = coef(i) - sa;
		const double xsx = x[i] / range - sx;
		ssa += asa * asa;
		ssx += xsx * xsx;
		sax += asa * xsx;
	}
	const double ssassx = std::sqrt(ssa * ssx);
	const double w1 = std::max(0.0, (ssassx - sax) * (ssassx + sax) / (ssa * ssx));
	const double w = 1.0 - w1;
	return {w, shapiro_p_value(n, w, w1), static_cast<int>(n), "shapiro_wilk"};
}

double percentile(std::span<const double> sorted, double p) {
	if (sorted.empty()) {
		throw EmptyError("percentile of an empty sample");
	}
	if (!(p >= 0.0 && p <= 1.0)) {
		throw ParamError("percentile probability must lie in [0, 1]", "p");
	}
	const double pos = static_cast<double>(sorted.size() - 1) * p;
	const auto lo = static_cast<std::size_t>(std::floor(pos));
	if (lo + 1 >= sorted.size()) {
		return sorted[lo];
	}
	const double frac = pos - static_cast<double>(lo);
	return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BootstrapForecast bootstrap_forecast(const arima::ArimaFit &fit, int horizon, double level, int replicates,
                                     std::uint64_t seed) {
	if (horizon < 1) {
		throw HorizonError("forecast horizon must be at least 1, got " + std::to_string(horizon), "horizon");
	}
	if (!(level > 0.0 && level < 1.0)) {
		throw ParamError("confidence level must lie in (0, 1)", "level");
	}
	if (replicates < kMinReplicates) {
		throw ReplicateError("bootstrap needs at least 100 replicates, got " + std::to_string(replicates),
		                     "replicates");
	}
	const auto resid = fit.residuals.values();
	if (resid.size() < kMinResiduals) {
		throw ShortResidualError("bootstrap needs at least 10 residuals, got " + std::to_string(resid.size()),
		                         "residuals");
	}

	const double rmean = series::mean(resid);
	std::vector<double> centered(resid.size());
	std::transform(resid.begin(), resid.end(), centered.begin(), [&](double e) { return e - rmean; });

	const auto h = static_cast<std::size_t>(horizon);
	const std::vector<double> zeros(h, 0.0);
	const auto point = arima::project(fit, zeros);
	const auto reps = static_cast<std::size_t>(replicates);

	// paths[s][r]: step s of replicate r.
	std::vector<std::vector<double>> paths(h, std::vector<double>(reps));
	std::vector<double> shocks(h);
	const auto m = static_cast<unsigned __int128>(centered.size());
	for (std::size_t r = 0; r < reps; ++r) {
		std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
		                  static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
		std::mt19937_64 rng(seq);
		for (auto &e : shocks) {
			e = centered[static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * m) >> 64)];
		}
		const auto path = arima::project(fit, shocks);
		for (std::size_t s = 0; s < h; ++s) {
			paths[s][r] = path[s];
		}
	}

	BootstrapForecast out;
	out.horizon = horizon;
	out.level = level;
	out.replicates = replicates;
	out.seed = seed;
	out.mean.resize(h);
	out.lower.resize(h);
	out.upper.resize(h);
	for (std::size_t s = 0; s < h; ++s) {
		auto &v = paths[s];
		double dev = 0.0;
		for (double x : v) {
			dev += x - point[s];
		}
		out.mean[s] = point[s] + dev / static_cast<double>(reps);
		std::sort(v.begin(), v.end());
		out.lower[s] = percentile(v, 0.5 * (1.0 - level));
		out.upper[s] = percentile(v, 0.5 * (1.0 + level));
	}
	return out;
}

DiagnosticsReport diagnose_residuals(std::span<const double> residuals, int fitted_params, double alpha) {
	if (!(alpha > 0.0 && alpha < 1.0)) {
		throw ParamError("significance level must lie in (0, 1)", "alpha");
	}
	DiagnosticsReport report;
	report.alpha = alpha;
	try {
		report.ljung_box = ljung_box(residuals, default_lag(residuals.size(), fitted_params), fitted_params);
		report.ljung_box_pass = report.ljung_box->p_value > alpha;
	} catch (const Error &e) {
		record(report, "ljung_box", e);
	}
	try {
		report.shapiro_wilk = shapiro_wilk(residuals);
		report.shapiro_wilk_pass = report.shapiro_wilk->p_value > alpha;
	} catch (const Error &e) {
		record(report, "shapiro_wilk", e);
	}
	return report;
}

DiagnosticsReport diagnose(const arima::ArimaFit &fit, double alpha) {
	return diagnose_residuals(fit.residuals.values(), fit.spec.p + fit.spec.q, alpha);
}

DiagnosticsReport diagnose(const statespace::StateSpaceFit &fit, double alpha) {
	return diagnose_residuals(fit.residuals.values(), 0, alpha);
}

} // namespace orecast::diagnostics
