#include "orecast/kalman.hpp"

#include "orecast/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace orecast::kalman {

namespace {

constexpr double kMinInnovationVar = 1e-300;

struct Workspace {
	Eigen::VectorXd a;     // predicted mean, then posterior mean
	Eigen::MatrixXd p;     // predicted cov, then posterior cov
	Eigen::VectorXd pc;    // P C
	Eigen::VectorXd gain;  // K
	Eigen::MatrixXd tmp;   // scratch
	Eigen::MatrixXd ikc;   // I - K C'

	explicit Workspace(Eigen::Index dim)
	    : a(dim), p(dim, dim), pc(dim), gain(dim), tmp(dim, dim), ikc(dim, dim) {}
};

void predict(const LinearModel &m, Workspace &ws, double control_input) {
	ws.a = m.transition * ws.a;
	if (m.control.size() > 0) {
		ws.a += m.control * control_input;
	}
	ws.tmp.noalias() = m.transition * ws.p;
	ws.p.noalias() = ws.tmp * m.transition.transpose();
	ws.p += m.process_cov;
}

// Joseph-form update keeps the posterior covariance symmetric PSD even
// when the prior is nearly diffuse.
void update(const LinearModel &m, Workspace &ws, double y, double &v, double &f) {
	ws.pc.noalias() = ws.p * m.observation;
	f = m.observation.dot(ws.pc) + m.observation_var;
	if (!(f > kMinInnovationVar)) {
		throw SingularError("innovation variance is numerically zero");
	}
	v = y - m.observation.dot(ws.a);
	ws.gain = ws.pc / f;
	ws.a += ws.gain * v;
	ws.ikc.setIdentity();
	ws.ikc.noalias() -= ws.gain * m.observation.transpose();
	ws.tmp.noalias() = ws.ikc * ws.p;
	ws.p.noalias() = ws.tmp * ws.ikc.transpose();
	ws.p.noalias() += (m.observation_var * ws.gain) * ws.gain.transpose();
	ws.p = 0.5 * (ws.p + ws.p.transpose()).eval();
}

} // namespace

StepResult step(const LinearModel &model, const Eigen::VectorXd &prior_mean, const Eigen::MatrixXd &prior_cov,
                std::optional<double> y, double control_input) {
	Workspace ws(prior_mean.size());
	ws.a = prior_mean;
	ws.p = prior_cov;
	predict(model, ws, control_input);

	StepResult out;
	if (y && std::isfinite(*y)) {
		double v = 0.0;
		double f = 0.0;
		update(model, ws, *y, v, f);
		out.innovation = v;
		out.innovation_var = f;
	}
	out.mean = ws.a;
	out.cov = ws.p;
	return out;
}

FilterResult filter(const LinearModel &model, const Eigen::VectorXd &mean0, const Eigen::MatrixXd &cov0,
                    std::span<const double> y, const FilterOptions &opts) {
	const Eigen::Index dim = mean0.size();
	Workspace ws(dim);
	ws.a = mean0;
	ws.p = cov0;

	FilterResult res;
	res.innovations.reserve(y.size());
	res.innovation_vars.reserve(y.size());
	if (opts.store_states) {
		res.means.reserve(y.size());
		res.covs.reserve(y.size());
	}

	Eigen::MatrixXd last_pred(dim, dim);
	bool have_last = false;
	bool frozen = false;
	int stable_steps = 0;
	double frozen_f = 0.0;
	Eigen::VectorXd frozen_gain(dim);
	Eigen::MatrixXd frozen_post(dim, dim);
	const double nan = std::numeric_limits<double>::quiet_NaN();

	for (std::size_t t = 0; t < y.size(); ++t) {
		const double u = t < opts.control.size() ? opts.control[t] : 0.0;
		const bool gap = !std::isfinite(y[t]);
		double v = nan;
		double f = nan;

		if (frozen && !gap) {
			ws.a = model.transition * ws.a;
			if (model.control.size() > 0) {
				ws.a += model.control * u;
			}
			f = frozen_f;
			v = y[t] - model.observation.dot(ws.a);
			ws.a += frozen_gain * v;
			ws.p = frozen_post;
		} else {
			frozen = false;
			predict(model, ws, u);
			if (opts.steady_state && !gap) {
				if (have_last) {
					const double scale = 1.0 + ws.p.cwiseAbs().maxCoeff();
					stable_steps = (ws.p - last_pred).cwiseAbs().maxCoeff() <= 1e-13 * scale ? stable_steps + 1 : 0;
				}
				last_pred = ws.p;
				have_last = true;
			}
			if (!gap) {
				update(model, ws, y[t], v, f);
				if (opts.steady_state && stable_steps >= 2) {
					frozen = true;
					frozen_f = f;
					frozen_gain = ws.gain;
					frozen_post = ws.p;
				}
			} else {
				have_last = false;
				stable_steps = 0;
			}
		}

		res.innovations.push_back(v);
		res.innovation_vars.push_back(f);
		if (!gap && t >= opts.skip) {
			res.sum_log_f += std::log(f);
			res.sum_sq += v * v / f;
			++res.used;
		}
		if (opts.store_states) {
			res.means.push_back(ws.a);
			res.covs.push_back(ws.p);
		}
	}
	res.final_mean = ws.a;
	res.final_cov = ws.p;
	return res;
}

double loglik(const FilterResult &res) {
	return -0.5 * (static_cast<double>(res.used) * std::log(2.0 * std::numbers::pi) + res.sum_log_f + res.sum_sq);
}

} // namespace orecast::kalman
