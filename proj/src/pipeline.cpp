#include "orecast/pipeline.hpp"

#include "orecast/analytics.hpp"
#include "orecast/error.hpp"
#include "orecast/statespace.hpp"
#include "orecast/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace orecast::pipeline {

namespace {

std::string lower(std::string_view s) {
	std::string out;
	for (char c : s) {
		if (c != '_' && c != '-' && c != ' ') {
			out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
		}
	}
	return out;
}

/// Both structural kinds; keeps the higher log-likelihood. Throws the
/// last error when neither fits.
statespace::StateSpaceFit best_structural(const TimeSeries &series, std::vector<std::string> &notes) {
	std::optional<statespace::StateSpaceFit> best;
	std::optional<TooShortError> too_short;
	for (auto kind : {statespace::Kind::LocalLevel, statespace::Kind::LocalTrend}) {
		try {
			auto fit = statespace::fit_structural(series, kind);
			if (!best || fit.loglik > best->loglik) {
				best = std::move(fit);
			}
		} catch (const TooShortError &e) {
			notes.push_back(statespace::to_string(kind) + " skipped: " + e.what());
			if (!too_short) {
				too_short = e;
			}
		} catch (const Error &e) {
			notes.push_back(statespace::to_string(kind) + " skipped: " + e.code() + ": " + e.what());
		}
	}
	if (best) {
		return *best;
	}
	if (too_short) {
		throw *too_short;
	}
	throw NoModelError("no structural model could be fitted");
}

struct Fitted {
	std::optional<arima::ArimaFit> arima;
	std::optional<statespace::StateSpaceFit> structural;
};

Fitted fit_models(const ForecastRequest &req, const TimeSeries &series, std::vector<std::string> &notes) {
	Fitted f;
	switch (req.model) {
	case ModelChoice::AutoArima: f.arima = arima::auto_arima(series); break;
	case ModelChoice::StateSpace: f.structural = best_structural(series, notes); break;
	case ModelChoice::Best: {
		auto a = arima::auto_arima(series);
		if (a.spec.d != 0) {
			notes.push_back("best: selected d=" + std::to_string(a.spec.d) +
			                ", likelihoods are not comparable with the structural models; kept ARIMA");
			f.arima = std::move(a);
			break;
		}
		std::vector<std::string> skipped;
		try {
			auto s = best_structural(series, skipped);
			// Same observations on both sides: the ARIMA likelihood is
			// conditioned on the points the structural prior absorbs.
			const std::size_t k = s.spec.diffuse_count();
			const double a_aic = a.aic + 2.0 * arma_head_loglik(a, k);
			const std::string tail = " on observations " + std::to_string(k + 1) + ".." + std::to_string(series.size());
			if (s.aic < a_aic) {
				notes.push_back("best: " + statespace::to_string(s.spec.kind) + " AIC " + text::format_double(s.aic) +
				                " below ARIMA" + a.spec.to_string() + " AIC " + text::format_double(a_aic) + tail);
				f.structural = std::move(s);
			} else {
				notes.push_back("best: ARIMA" + a.spec.to_string() + " AIC " + text::format_double(a_aic) +
				                " not above " + statespace::to_string(s.spec.kind) + " AIC " +
				                text::format_double(s.aic) + tail);
				f.arima = std::move(a);
			}
		} catch (const Error &e) {
			notes.push_back(std::string("best: no structural model fitted (") + e.what() + "); kept ARIMA");
			f.arima = std::move(a);
		}
		notes.insert(notes.end(), skipped.begin(), skipped.end());
		break;
	}
	}
	return f;
}

PipelineResult run(const ForecastRequest &request, const Dataset &data, bool with_forecast) {
	request.validate();
	PipelineResult out;
	out.request = request;
	out.request.horizon = request.resolved_horizon();
	const TimeSeries series = resolve_series(request, data, &out.notes);
	out.series = summarize(series);

	const Fitted f = fit_models(request, series, out.notes);
	if (f.arima) {
		out.fit = summarize(*f.arima);
		out.diagnostics = diagnostics::diagnose(*f.arima, request.alpha);
	} else {
		out.fit = summarize(*f.structural);
		out.diagnostics = diagnostics::diagnose(*f.structural, request.alpha);
	}
	if (!with_forecast) {
		return out;
	}

	const int h = *out.request.horizon;
	out.forecast = f.arima ? arima::forecast_arima(*f.arima, h, request.confidence)
	                       : statespace::forecast_structural(*f.structural, h, request.confidence);
	if (request.bootstrap) {
		if (!f.arima) {
			out.notes.push_back("bootstrap skipped: only available for ARIMA fits");
		} else {
			try {
				out.bootstrap =
				    diagnostics::bootstrap_forecast(*f.arima, h, request.confidence, request.replicates, request.seed);
			} catch (const ShortResidualError &e) {
				out.notes.push_back(std::string("bootstrap skipped: ") + e.what());
			}
		}
	}
	return out;
}

} // namespace

FitSummary summarize(const arima::ArimaFit &fit) {
	FitSummary s;
	s.family = "arima";
	s.model = "ARIMA" + fit.spec.to_string();
	s.order = fit.spec;
	s.c = fit.c;
	s.phi = fit.phi;
	s.theta = fit.theta;
	s.sigma2 = fit.sigma2;
	s.loglik = fit.loglik;
	s.aic = fit.aic;
	s.n_effective = fit.n_effective;
	return s;
}

FitSummary summarize(const statespace::StateSpaceFit &fit) {
	FitSummary s;
	s.family = "statespace";
	s.model = statespace::to_string(fit.spec.kind);
	s.q_variances = fit.q_variances;
	s.r_variance = fit.r_variance;
	s.loglik = fit.loglik;
	s.aic = fit.aic;
	return s;
}

SeriesSummary summarize(const TimeSeries &s) {
	return {s.size(), s.start(), s.end(), s.frequency(), s.unit(), {s.values().begin(), s.values().end()}};
}

double arma_head_loglik(const arima::ArimaFit &fit, std::size_t k) {
	if ((k != 1 && k != 2) || fit.spec.d != 0 || fit.series.size() < k) {
		throw ParamError("head likelihood needs a d = 0 fit and k of 1 or 2", "k");
	}
	const auto psi = arima::psi_weights(fit.phi, fit.theta, 0, 5000);
	double g0 = 0.0;
	double g1 = 0.0;
	for (std::size_t j = 0; j < psi.size(); ++j) {
		g0 += psi[j] * psi[j];
		if (j + 1 < psi.size()) {
			g1 += psi[j] * psi[j + 1];
		}
	}
	g0 *= fit.sigma2;
	g1 *= fit.sigma2;
	const double mu = fit.process_mean();
	const double e0 = fit.series[0] - mu;
	constexpr double kLog2Pi = 1.8378770664093453;
	if (k == 1) {
		return -0.5 * (kLog2Pi + std::log(g0) + e0 * e0 / g0);
	}
	const double e1 = fit.series[1] - mu;
	const double det = g0 * g0 - g1 * g1;
	const double quad = (g0 * e0 * e0 - 2.0 * g1 * e0 * e1 + g0 * e1 * e1) / det;
	return -0.5 * (2.0 * kLog2Pi + std::log(det) + quad);
}

std::string to_string(Level level) {
	switch (level) {
	case Level::AnnualTotal: return "AnnualTotal";
	case Level::Mineral: return "Mineral";
	case Level::Department: return "Department";
	}
	return {};
}

std::string to_string(ModelChoice model) {
	switch (model) {
	case ModelChoice::AutoArima: return "AutoArima";
	case ModelChoice::StateSpace: return "StateSpace";
	case ModelChoice::Best: return "Best";
	}
	return {};
}

Level parse_level(std::string_view s) {
	const auto k = lower(s);
	if (k == "annual" || k == "annualtotal") {
		return Level::AnnualTotal;
	}
	if (k == "mineral") {
		return Level::Mineral;
	}
	if (k == "department") {
		return Level::Department;
	}
	throw ParamError("level must be annual, mineral or department; got '" + std::string(s) + "'", "level");
}

ModelChoice parse_model(std::string_view s) {
	const auto k = lower(s);
	if (k == "autoarima" || k == "arima" || k == "auto") {
		return ModelChoice::AutoArima;
	}
	if (k == "statespace" || k == "structural") {
		return ModelChoice::StateSpace;
	}
	if (k == "best") {
		return ModelChoice::Best;
	}
	throw ParamError("model must be auto_arima, state_space or best; got '" + std::string(s) + "'", "model");
}

void ForecastRequest::validate() const {
	if (text::trim(target).empty()) {
		throw ParamError("target is required", "target");
	}
	if (horizon && *horizon < 1) {
		throw HorizonError("horizon must be a positive integer", "horizon");
	}
	if (!(confidence > 0.0 && confidence < 1.0)) {
		throw ParamError("confidence must lie in (0, 1)", "confidence");
	}
	if (!(alpha > 0.0 && alpha < 1.0)) {
		throw ParamError("alpha must lie in (0, 1)", "alpha");
	}
	if (bootstrap && replicates < 100) {
		throw ReplicateError("bootstrap needs at least 100 replicates", "replicates");
	}
}

int ForecastRequest::resolved_horizon() const {
	return horizon.value_or(level == Level::AnnualTotal ? kAnnualHorizon : kMonthlyHorizon);
}

TimeSeries annual_series(const ingest::AnnualData &annual, std::string_view mineral, std::vector<std::string> *notes) {
	const auto &col = annual.column(mineral);
	std::vector<std::pair<int, double>> known;
	for (const auto &r : annual.records) {
		const auto it = r.quantities.find(col.mineral);
		if (it != r.quantities.end() && it->second) {
			known.emplace_back(r.year, *it->second);
		}
	}
	if (known.empty()) {
		throw SelectionError("annual column '" + col.mineral + "' has no values", "target");
	}
	std::vector<double> values;
	for (std::size_t i = 0; i < known.size(); ++i) {
		if (i > 0) {
			const auto [y0, v0] = known[i - 1];
			const auto [y1, v1] = known[i];
			for (int y = y0 + 1; y < y1; ++y) {
				const double v = v0 + (v1 - v0) * (y - y0) / static_cast<double>(y1 - y0);
				values.push_back(v);
				if (notes) {
					notes->push_back("interpolated " + col.mineral + " " + std::to_string(y) + " = " +
					                 text::format_double(v));
				}
			}
		}
		values.push_back(known[i].second);
	}
	return TimeSeries(std::move(values), {known.front().first, 1}, Frequency::Annual, col.unit);
}

TimeSeries resolve_series(const ForecastRequest &request, const Dataset &data, std::vector<std::string> *notes) {
	if (request.level == Level::AnnualTotal) {
		return annual_series(data.annual, request.target, notes);
	}
	ingest::Selector sel;
	if (request.level == Level::Mineral) {
		sel.mineral = request.target;
	} else {
		const auto dept = text::normalize_name(request.target);
		if (std::find(analytics::kDepartments.begin(), analytics::kDepartments.end(), dept) ==
		    analytics::kDepartments.end()) {
			throw SelectionError("unknown department '" + dept + "'", "target");
		}
		sel.department = request.target;
		sel.mineral = request.mineral;
	}
	ingest::CleaningReport log;
	try {
		auto s = ingest::to_series(data.monthly, sel, &log);
		if (notes && !log.messages.empty()) {
			notes->push_back(std::to_string(log.messages.size()) + " months without records filled with 0");
		}
		return s;
	} catch (const EmptySelectionError &e) {
		throw SelectionError(e.what(), "target");
	}
}

PipelineResult run_forecast(const ForecastRequest &request, const Dataset &data) { return run(request, data, true); }

PipelineResult run_diagnostics(const ForecastRequest &request, const Dataset &data) {
	return run(request, data, false);
}

} // namespace orecast::pipeline
