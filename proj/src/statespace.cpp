#include "orecast/statespace.hpp"

#include "orecast/distributions.hpp"
#include "orecast/error.hpp"
#include "orecast/optimize.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace orecast::statespace {

namespace {

constexpr double kDiffuseScale = 1e7;
constexpr double kLogVarFloor = -30.0;

Variances unpack(std::span<const double> x, Kind kind) {
	auto var = [](double v) { return std::exp(std::max(v, kLogVarFloor)); };
	if (kind == Kind::LocalLevel) {
		return {{var(x[0])}, var(x[1])};
	}
	return {{var(x[0]), var(x[1])}, var(x[2])};
}

kalman::FilterResult run(std::span<const double> y, const StateSpaceSpec &spec, const Variances &v, bool store) {
	const auto model = make_model(spec, v);
	const double kappa = kDiffuseScale * std::max(series::variance(y), std::numeric_limits<double>::min());
	const Eigen::Index dim = spec.state_dim();
	kalman::FilterOptions opts;
	opts.skip = spec.diffuse_count();
	opts.store_states = store;
	opts.steady_state = !store;
	if (spec.control) {
		opts.control = spec.control->inputs;
	}
	return kalman::filter(model, Eigen::VectorXd::Zero(dim), kappa * Eigen::MatrixXd::Identity(dim, dim), y, opts);
}

} // namespace

std::string to_string(Kind kind) { return kind == Kind::LocalLevel ? "LocalLevel" : "LocalTrend"; }

Eigen::MatrixXd StateSpaceSpec::transition() const {
	if (kind == Kind::LocalLevel) {
		return Eigen::MatrixXd::Identity(1, 1);
	}
	Eigen::MatrixXd a(2, 2);
	a << 1.0, 1.0, 0.0, 1.0;
	return a;
}

Eigen::VectorXd StateSpaceSpec::observation() const {
	Eigen::VectorXd c = Eigen::VectorXd::Zero(state_dim());
	c(0) = 1.0;
	return c;
}

std::size_t min_length(Kind kind) { return kind == Kind::LocalLevel ? 4 : 6; }

kalman::LinearModel make_model(const StateSpaceSpec &spec, const Variances &v) {
	const Eigen::Index dim = spec.state_dim();
	if (v.q.size() != static_cast<std::size_t>(dim)) {
		throw ParamError("expected " + std::to_string(dim) + " process-noise variance(s)");
	}
	kalman::LinearModel m;
	m.transition = spec.transition();
	m.observation = spec.observation();
	m.process_cov = Eigen::MatrixXd::Zero(dim, dim);
	for (Eigen::Index i = 0; i < dim; ++i) {
		if (!(v.q[static_cast<std::size_t>(i)] >= 0.0)) {
			throw ParamError("process-noise variances must be non-negative");
		}
		m.process_cov(i, i) = v.q[static_cast<std::size_t>(i)];
	}
	if (!(v.r >= 0.0)) {
		throw ParamError("observation-noise variance must be non-negative");
	}
	m.observation_var = v.r;
	if (spec.control) {
		if (spec.control->loading.size() != dim) {
			throw ParamError("control loading must match the state dimension");
		}
		m.control = spec.control->loading;
	}
	return m;
}

kalman::StepResult kalman_step(const Eigen::VectorXd &prior_mean, const Eigen::MatrixXd &prior_cov,
                               std::optional<double> observation, const StateSpaceSpec &spec, const Variances &v,
                               double control_input) {
	return kalman::step(make_model(spec, v), prior_mean, prior_cov, observation, control_input);
}

double structural_loglik(std::span<const double> y, const StateSpaceSpec &spec, const Variances &v) {
	return kalman::loglik(run(y, spec, v, false));
}

bool is_symmetric_psd(const Eigen::MatrixXd &m, double tol) {
	const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
	if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
		return false;
	}
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
	return es.eigenvalues().minCoeff() >= -tol * scale;
}

StateSpaceFit fit_structural(const TimeSeries &series, Kind kind, const arima::FitOptions &opts) {
	const std::size_t needed = min_length(kind);
	if (series.size() < needed) {
		throw TooShortError(to_string(kind) + " model needs at least " + std::to_string(needed) +
		                        " observations, got " + std::to_string(series.size()),
		                    needed, series.size());
	}
	const double var = series::variance(series.values());
	if (!(var > 0.0)) {
		throw DegenerateError("structural model needs a series with positive variance");
	}

	// Optimize on a unit-variance copy so the log-variance floor and the
	// simplex steps do not depend on the units of the data.
	const double scale = std::sqrt(var);
	std::vector<double> ys(series.size());
	for (std::size_t i = 0; i < ys.size(); ++i) {
		ys[i] = series[i] / scale;
	}
	double vd = series::variance(series::difference(ys, 1));
	if (!(vd > 0.0)) {
		vd = 1e-2;
	}
	std::vector<double> x0 = kind == Kind::LocalLevel
	                             ? std::vector<double>{std::log(vd / 2.0), std::log(vd / 2.0)}
	                             : std::vector<double>{std::log(vd / 4.0), std::log(vd / 100.0), std::log(vd / 2.0)};

	StateSpaceSpec spec{kind, std::nullopt};
	optim::NelderMeadOptions nm;
	nm.rel_tol = opts.rel_tol;
	nm.max_evaluations = opts.max_evaluations;
	nm.initial_step = 1.0;
	auto res = optim::nelder_mead(
	    [&](std::span<const double> x) {
		    try {
			    return -structural_loglik(ys, spec, unpack(x, kind));
		    } catch (const SingularError &) {
			    return std::numeric_limits<double>::infinity();
		    }
	    },
	    x0, nm);
	if (!res.converged) {
		throw ConvergenceError(to_string(kind) + " likelihood did not converge within " +
		                       std::to_string(opts.max_evaluations) + " evaluations");
	}

	Variances v = unpack(res.x, kind);
	const double s2 = scale * scale;
	for (double &q : v.q) {
		q *= s2;
	}
	v.r *= s2;

	const auto filtered = run(series.values(), spec, v, true);
	StateSpaceFit fit{
	    .spec = spec,
	    .q_variances = v.q,
	    .r_variance = v.r,
	    .loglik = kalman::loglik(filtered),
	    .aic = 0.0,
	    .filtered_states = {},
	    .residuals = series,
	    .series = series,
	};
	fit.aic = 2.0 * static_cast<double>(v.q.size() + 1) - 2.0 * fit.loglik;
	fit.filtered_states.reserve(series.size());
	for (std::size_t t = 0; t < series.size(); ++t) {
		fit.filtered_states.push_back({filtered.means[t], filtered.covs[t]});
	}
	const std::size_t skip = spec.diffuse_count();
	std::vector<double> resid;
	resid.reserve(series.size() - skip);
	for (std::size_t t = skip; t < series.size(); ++t) {
		resid.push_back(filtered.innovations[t] / std::sqrt(filtered.innovation_vars[t]));
	}
	fit.residuals = series.with_values(std::move(resid), static_cast<long>(skip));
	return fit;
}

arima::ForecastResult forecast_structural(const StateSpaceFit &fit, int horizon, double level,
                                          std::span<const double> future_control) {
	if (horizon < 1) {
		throw HorizonError("forecast horizon must be at least 1, got " + std::to_string(horizon), "horizon");
	}
	if (!(level > 0.0 && level < 1.0)) {
		throw ParamError("confidence level must lie in (0, 1)", "level");
	}
	if (fit.filtered_states.empty()) {
		throw ParamError("fit carries no filtered states");
	}
	const auto model = make_model(fit.spec, {fit.q_variances, fit.r_variance});
	Eigen::VectorXd a = fit.filtered_states.back().mean;
	Eigen::MatrixXd p = fit.filtered_states.back().cov;
	const double z = dist::normal_quantile(0.5 * (1.0 + level));

	arima::ForecastResult out;
	out.horizon = horizon;
	out.level = level;
	out.unit = fit.series.unit();
	out.frequency = fit.series.frequency();
	out.start = fit.series.end().advance(1, out.frequency);
	for (int h = 0; h < horizon; ++h) {
		a = model.transition * a;
		if (model.control.size() > 0 && static_cast<std::size_t>(h) < future_control.size()) {
			a += model.control * future_control[static_cast<std::size_t>(h)];
		}
		p = model.transition * p * model.transition.transpose() + model.process_cov;
		const double mean = model.observation.dot(a);
		const double var = model.observation.dot(p * model.observation) + model.observation_var;
		const double half = z * std::sqrt(std::max(var, 0.0));
		out.mean.push_back(mean);
		out.lower.push_back(mean - half);
		out.upper.push_back(mean + half);
	}
	return out;
}

} // namespace orecast::statespace
