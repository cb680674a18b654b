#include "orecast/arima.hpp"

#include "orecast/distributions.hpp"
#include "orecast/error.hpp"
#include "orecast/kalman.hpp"
#include "orecast/optimize.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace orecast::arima {

namespace {

constexpr double kPacfBound = 1.0 - 1e-7;
constexpr std::size_t kBurnIn = 200;

// Harvey state-space form with unit innovation variance.
struct ArmaStateSpace {
	kalman::LinearModel model;
	Eigen::MatrixXd initial_cov;
};

ArmaStateSpace make_state_space(std::span<const double> phi, std::span<const double> theta) {
	const auto p = static_cast<Eigen::Index>(phi.size());
	const auto q = static_cast<Eigen::Index>(theta.size());
	const Eigen::Index r = std::max(p, q + 1);

	ArmaStateSpace ss;
	auto &m = ss.model;
	m.transition = Eigen::MatrixXd::Zero(r, r);
	for (Eigen::Index i = 0; i < p; ++i) {
		m.transition(i, 0) = phi[static_cast<std::size_t>(i)];
	}
	for (Eigen::Index i = 0; i + 1 < r; ++i) {
		m.transition(i, i + 1) = 1.0;
	}
	Eigen::VectorXd loading = Eigen::VectorXd::Zero(r);
	loading(0) = 1.0;
	for (Eigen::Index j = 0; j < q; ++j) {
		loading(j + 1) = theta[static_cast<std::size_t>(j)];
	}
	m.process_cov = loading * loading.transpose();
	m.observation = Eigen::VectorXd::Zero(r);
	m.observation(0) = 1.0;
	m.observation_var = 0.0;

	// Stationary covariance: P = T P T' + R R', solved in vectorized form.
	const Eigen::Index r2 = r * r;
	Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(r2, r2);
	for (Eigen::Index i = 0; i < r; ++i) {
		for (Eigen::Index j = 0; j < r; ++j) {
			const double tij = m.transition(i, j);
			if (tij == 0.0) {
				continue;
			}
			for (Eigen::Index k = 0; k < r; ++k) {
				for (Eigen::Index l = 0; l < r; ++l) {
					// vec is column-major: vec(P)(a + b r) = P(a, b)
					lhs(i + k * r, j + l * r) -= tij * m.transition(k, l);
				}
			}
		}
	}
	Eigen::Map<const Eigen::VectorXd> rhs(m.process_cov.data(), r2);
	Eigen::VectorXd sol = lhs.partialPivLu().solve(rhs);
	ss.initial_cov = Eigen::Map<Eigen::MatrixXd>(sol.data(), r, r);
	ss.initial_cov = 0.5 * (ss.initial_cov + ss.initial_cov.transpose()).eval();
	return ss;
}

kalman::FilterResult run_arma_filter(std::span<const double> w, std::span<const double> phi,
                                     std::span<const double> theta) {
	const auto ss = make_state_space(phi, theta);
	const Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(ss.initial_cov.rows());
	return kalman::filter(ss.model, mean0, ss.initial_cov, w);
}

struct Unpacked {
	std::vector<double> phi;
	std::vector<double> theta;
};

Unpacked unpack(std::span<const double> raw, int p, int q) {
	Unpacked u;
	u.phi = to_stationary(raw.subspan(0, static_cast<std::size_t>(p)));
	auto ma = to_stationary(raw.subspan(static_cast<std::size_t>(p), static_cast<std::size_t>(q)));
	u.theta.resize(ma.size());
	std::transform(ma.begin(), ma.end(), u.theta.begin(), [](double a) { return -a; });
	return u;
}

// Concentrated negative log-likelihood (sigma2 profiled out), constants dropped.
double concentrated_nll(std::span<const double> w, const Unpacked &u) {
	const auto res = run_arma_filter(w, u.phi, u.theta);
	const double n = static_cast<double>(res.used);
	const double s2 = res.sum_sq / n;
	if (!(s2 > 0.0) || !std::isfinite(res.sum_log_f)) {
		return std::numeric_limits<double>::infinity();
	}
	return 0.5 * (n * std::log(s2) + res.sum_log_f);
}

double css_objective(std::span<const double> w, const Unpacked &u) {
	const std::size_t p = u.phi.size();
	const std::size_t q = u.theta.size();
	std::vector<double> e(w.size(), 0.0);
	double ss = 0.0;
	for (std::size_t t = p; t < w.size(); ++t) {
		double pred = 0.0;
		for (std::size_t i = 0; i < p; ++i) {
			pred += u.phi[i] * w[t - i - 1];
		}
		for (std::size_t j = 0; j < q && j < t; ++j) {
			pred += u.theta[j] * e[t - j - 1];
		}
		e[t] = w[t] - pred;
		ss += e[t] * e[t];
	}
	return ss;
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

void ArimaSpec::validate() const {
	if (p < 0 || p > kMaxP || d < 0 || d > kMaxD || q < 0 || q > kMaxQ) {
		throw ParamError("ARIMA orders out of range: " + to_string());
	}
}

std::string ArimaSpec::to_string() const {
	return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

double ArimaFit::process_mean() const {
	const double denom = 1.0 - sum(phi);
	return denom != 0.0 ? c / denom : 0.0;
}

std::size_t min_length(const ArimaSpec &spec) {
	return std::max<std::size_t>(8, static_cast<std::size_t>(3 * (spec.p + spec.q) + 2));
}

std::vector<double> to_stationary(std::span<const double> raw) {
	const std::size_t k = raw.size();
	std::vector<double> coef(k, 0.0);
	std::vector<double> prev(k, 0.0);
	for (std::size_t m = 0; m < k; ++m) {
		const double pacf = std::clamp(std::tanh(raw[m]), -kPacfBound, kPacfBound);
		prev = coef;
		coef[m] = pacf;
		for (std::size_t j = 0; j < m; ++j) {
			coef[j] = prev[j] - pacf * prev[m - 1 - j];
		}
	}
	return coef;
}

std::vector<double> from_stationary(std::span<const double> coef) {
	const std::size_t k = coef.size();
	std::vector<double> cur(coef.begin(), coef.end());
	std::vector<double> raw(k, 0.0);
	for (std::size_t m = k; m-- > 0;) {
		const double pacf = std::clamp(cur[m], -kPacfBound, kPacfBound);
		raw[m] = std::atanh(pacf);
		const double denom = 1.0 - pacf * pacf;
		std::vector<double> next(m);
		for (std::size_t j = 0; j < m; ++j) {
			next[j] = (cur[j] + pacf * cur[m - 1 - j]) / denom;
		}
		cur = std::move(next);
	}
	return raw;
}

bool roots_outside_unit_circle(std::span<const double> a, double margin) {
	std::size_t k = a.size();
	while (k > 0 && a[k - 1] == 0.0) {
		--k;
	}
	if (k == 0) {
		return true;
	}
	// Roots of 1 - sum a_i z^i are reciprocals of the companion eigenvalues.
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
	for (std::size_t i = 0; i < k; ++i) {
		companion(0, static_cast<Eigen::Index>(i)) = a[i];
	}
	for (std::size_t i = 1; i < k; ++i) {
		companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
	}
	const Eigen::VectorXcd eig = companion.eigenvalues();
	const double limit = 1.0 / (1.0 + margin);
	for (Eigen::Index i = 0; i < eig.size(); ++i) {
		if (std::abs(eig(i)) >= limit) {
			return false;
		}
	}
	return true;
}

double arma_loglik(std::span<const double> w, std::span<const double> phi, std::span<const double> theta,
                   double sigma2) {
	if (!(sigma2 > 0.0)) {
		throw ParamError("innovation variance must be positive");
	}
	const auto res = run_arma_filter(w, phi, theta);
	const double n = static_cast<double>(res.used);
	return -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma2) + res.sum_log_f + res.sum_sq / sigma2);
}

ArimaFit fit_arima(const TimeSeries &series, const ArimaSpec &spec, const FitOptions &opts) {
	spec.validate();
	const std::size_t needed = min_length(spec);
	if (series.size() < static_cast<std::size_t>(spec.d) + needed) {
		throw TooShortError("ARIMA" + spec.to_string() + " needs at least " +
		                        std::to_string(needed + static_cast<std::size_t>(spec.d)) + " observations, got " +
		                        std::to_string(series.size()),
		                    needed + static_cast<std::size_t>(spec.d), series.size());
	}
	const TimeSeries diffed = series::difference(series, spec.d);
	std::vector<double> w(diffed.values().begin(), diffed.values().end());
	if (!(series::variance(w) > 0.0)) {
		throw DegenerateError("series has zero variance after differencing " + std::to_string(spec.d) + " time(s)");
	}
	const double mu = spec.d == 0 ? series::mean(w) : 0.0;
	for (double &v : w) {
		v -= mu;
	}

	const int k = spec.p + spec.q;
	std::vector<double> raw(static_cast<std::size_t>(k), 0.0);
	if (k > 0) {
		optim::NelderMeadOptions css_opts;
		css_opts.rel_tol = 1e-6;
		css_opts.max_evaluations = opts.max_evaluations;
		css_opts.restarts = 0;
		auto css = optim::nelder_mead(
		    [&](std::span<const double> x) { return css_objective(w, unpack(x, spec.p, spec.q)); }, raw, css_opts);
		raw = css.x;

		optim::NelderMeadOptions ml_opts;
		ml_opts.rel_tol = opts.rel_tol;
		ml_opts.max_evaluations = opts.max_evaluations;
		auto ml = optim::nelder_mead(
		    [&](std::span<const double> x) { return concentrated_nll(w, unpack(x, spec.p, spec.q)); }, raw, ml_opts);
		if (!ml.converged) {
			throw ConvergenceError("ARIMA" + spec.to_string() + " likelihood did not converge within " +
			                       std::to_string(opts.max_evaluations) + " evaluations");
		}
		raw = ml.x;
	}

	auto coef = unpack(raw, spec.p, spec.q);
	std::vector<double> neg_theta(coef.theta.size());
	std::transform(coef.theta.begin(), coef.theta.end(), neg_theta.begin(), [](double t) { return -t; });
	if (!roots_outside_unit_circle(coef.phi) || !roots_outside_unit_circle(neg_theta)) {
		throw ConvergenceError("ARIMA" + spec.to_string() + " estimate lies on the stationarity/invertibility boundary");
	}

	const auto res = run_arma_filter(w, coef.phi, coef.theta);
	const double n = static_cast<double>(res.used);
	const double sigma2 = res.sum_sq / n;
	if (!(sigma2 > 0.0)) {
		throw DegenerateError("fitted innovation variance is zero");
	}

	std::vector<double> resid(w.size());
	for (std::size_t t = 0; t < w.size(); ++t) {
		resid[t] = res.innovations[t] / std::sqrt(res.innovation_vars[t]);
	}

	ArimaFit fit{
	    .spec = spec,
	    .c = mu * (1.0 - sum(coef.phi)),
	    .phi = std::move(coef.phi),
	    .theta = std::move(coef.theta),
	    .sigma2 = sigma2,
	    .residuals = diffed.with_values(std::move(resid)),
	    .loglik = -0.5 * (n * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0) + res.sum_log_f),
	    .aic = 0.0,
	    .n_effective = w.size(),
	    .series = series,
	};
	fit.aic = 2.0 * (spec.p + spec.q + 2) - 2.0 * fit.loglik;
	return fit;
}

int select_differencing(std::span<const double> values) {
	double prev_var = 0.0;
	for (int d = 0; d <= kMaxD; ++d) {
		if (values.size() <= static_cast<std::size_t>(d) + 1) {
			break;
		}
		const auto w = series::difference(values, d);
		const double var = series::variance(w);
		bool ok = d == 0 || var <= prev_var;
		if (ok) {
			if (!(var > 0.0)) {
				ok = false;
			} else {
				ok = std::abs(series::acf(w, 1).coefficients[0]) < 0.95;
			}
		}
		if (ok) {
			return d;
		}
		prev_var = var;
	}
	return kMaxD;
}

ArimaFit auto_arima(const TimeSeries &series, const FitOptions &opts) {
	constexpr std::size_t kMinLength = 10;
	if (series.size() < kMinLength) {
		throw TooShortError("automatic ARIMA selection needs at least " + std::to_string(kMinLength) +
		                        " observations, got " + std::to_string(series.size()),
		                    kMinLength, series.size());
	}
	const int d = select_differencing(series.values());

	std::optional<ArimaFit> best;
	std::string last_error;
	for (int p = 0; p <= kMaxP; ++p) {
		for (int q = 0; q <= kMaxQ; ++q) {
			if (p + q > 6) {
				continue;
			}
			try {
				auto fit = fit_arima(series, {p, d, q}, opts);
				if (!best) {
					best = std::move(fit);
					continue;
				}
				const int kb = best->spec.p + best->spec.q;
				const int kf = p + q;
				const bool better = fit.aic < best->aic ||
				                    (fit.aic == best->aic && (kf < kb || (kf == kb && p < best->spec.p)));
				if (better) {
					best = std::move(fit);
				}
			} catch (const Error &e) {
				last_error = e.what();
			}
		}
	}
	if (!best) {
		throw NoModelError("no ARIMA candidate could be fitted at d=" + std::to_string(d) +
		                   (last_error.empty() ? std::string{} : ": " + last_error));
	}
	return std::move(*best);
}

std::vector<double> psi_weights(std::span<const double> phi, std::span<const double> theta, int d, int count) {
	// Coefficients of phi(B)(1-B)^d, written as 1 - sum a_i B^i.
	std::vector<double> poly(phi.size() + 1, 0.0);
	poly[0] = 1.0;
	for (std::size_t i = 0; i < phi.size(); ++i) {
		poly[i + 1] = -phi[i];
	}
	for (int pass = 0; pass < d; ++pass) {
		std::vector<double> next(poly.size() + 1, 0.0);
		for (std::size_t i = 0; i < poly.size(); ++i) {
			next[i] += poly[i];
			next[i + 1] -= poly[i];
		}
		poly = std::move(next);
	}
	std::vector<double> psi(static_cast<std::size_t>(std::max(count, 0)), 0.0);
	for (std::size_t j = 0; j < psi.size(); ++j) {
		double v = j == 0 ? 1.0 : (j <= theta.size() ? theta[j - 1] : 0.0);
		for (std::size_t i = 1; i < poly.size() && i <= j; ++i) {
			v -= poly[i] * psi[j - i];
		}
		psi[j] = v;
	}
	return psi;
}

std::vector<double> project(const ArimaFit &fit, std::span<const double> shocks) {
	const std::size_t h = shocks.size();
	const auto w_all = series::difference(fit.series.values(), fit.spec.d);
	const double mu = fit.spec.d == 0 ? fit.process_mean() : 0.0;
	const auto resid = fit.residuals.values();
	const std::size_t p = fit.phi.size();
	const std::size_t q = fit.theta.size();

	// z: demeaned differenced values, history followed by the future.
	std::vector<double> z(w_all.size() + h);
	std::vector<double> e(w_all.size() + h, 0.0);
	if (resid.size() != w_all.size()) {
		throw ParamError("fit residuals must align with the differenced series");
	}
	for (std::size_t t = 0; t < w_all.size(); ++t) {
		z[t] = w_all[t] - mu;
		e[t] = resid[t];
	}

	std::vector<double> future(h);
	for (std::size_t s = 0; s < h; ++s) {
		const std::size_t t = w_all.size() + s;
		double v = shocks[s];
		for (std::size_t i = 0; i < p && i < t; ++i) {
			v += fit.phi[i] * z[t - i - 1];
		}
		for (std::size_t j = 0; j < q && j < t; ++j) {
			v += fit.theta[j] * e[t - j - 1];
		}
		z[t] = v;
		e[t] = shocks[s];
		future[s] = v + mu;
	}

	const auto values = fit.series.values();
	const auto d = static_cast<std::size_t>(fit.spec.d);
	return series::inverse_difference(future, values.subspan(values.size() - d, d), fit.spec.d);
}

ForecastResult forecast_arima(const ArimaFit &fit, int horizon, double level) {
	if (horizon < 1) {
		throw HorizonError("forecast horizon must be at least 1, got " + std::to_string(horizon), "horizon");
	}
	if (!(level > 0.0 && level < 1.0)) {
		throw ParamError("confidence level must lie in (0, 1)", "level");
	}
	const std::vector<double> zeros(static_cast<std::size_t>(horizon), 0.0);
	ForecastResult out;
	out.horizon = horizon;
	out.level = level;
	out.unit = fit.series.unit();
	out.frequency = fit.series.frequency();
	out.start = fit.series.end().advance(1, out.frequency);
	out.mean = project(fit, zeros);

	const double z = dist::normal_quantile(0.5 * (1.0 + level));
	const auto psi = psi_weights(fit.phi, fit.theta, fit.spec.d, horizon);
	double acc = 0.0;
	out.lower.resize(out.mean.size());
	out.upper.resize(out.mean.size());
	for (std::size_t h = 0; h < out.mean.size(); ++h) {
		acc += psi[h] * psi[h];
		const double half = z * std::sqrt(fit.sigma2 * acc);
		out.lower[h] = out.mean[h] - half;
		out.upper[h] = out.mean[h] + half;
	}
	return out;
}

TimeSeries simulate_arima(const ArimaParams &params, std::size_t n, std::uint64_t seed, CalendarPoint start,
                          Frequency freq) {
	params.spec.validate();
	if (n < 1) {
		throw ParamError("simulation length must be at least 1");
	}
	if (params.phi.size() != static_cast<std::size_t>(params.spec.p) ||
	    params.theta.size() != static_cast<std::size_t>(params.spec.q)) {
		throw ParamError("coefficient counts do not match ARIMA" + params.spec.to_string());
	}
	std::vector<double> neg_theta(params.theta.size());
	std::transform(params.theta.begin(), params.theta.end(), neg_theta.begin(), [](double t) { return -t; });
	if (!roots_outside_unit_circle(params.phi)) {
		throw ParamError("AR coefficients are not stationary");
	}
	if (!roots_outside_unit_circle(neg_theta)) {
		throw ParamError("MA coefficients are not invertible");
	}
	if (!(params.sigma2 >= 0.0)) {
		throw ParamError("innovation variance must be non-negative");
	}

	std::mt19937_64 rng(seed);
	std::normal_distribution<double> normal(0.0, 1.0);
	const double sigma = std::sqrt(params.sigma2);
	const std::size_t p = params.phi.size();
	const std::size_t q = params.theta.size();
	const double mu = params.c / (1.0 - sum(params.phi));
	const std::size_t total = kBurnIn + n;

	std::vector<double> w(total);
	std::vector<double> e(total);
	for (std::size_t t = 0; t < total; ++t) {
		e[t] = sigma > 0.0 ? sigma * normal(rng) : 0.0;
		double v = params.c + e[t];
		for (std::size_t i = 0; i < p; ++i) {
			v += params.phi[i] * (t > i ? w[t - i - 1] : mu);
		}
		for (std::size_t j = 0; j < q && j < t; ++j) {
			v += params.theta[j] * e[t - j - 1];
		}
		w[t] = v;
	}
	std::vector<double> out(w.begin() + static_cast<std::ptrdiff_t>(kBurnIn), w.end());
	for (int pass = 0; pass < params.spec.d; ++pass) {
		double acc = 0.0;
		for (double &v : out) {
			acc += v;
			v = acc;
		}
	}
	return TimeSeries(std::move(out), start, freq);
}

} // namespace orecast::arima
