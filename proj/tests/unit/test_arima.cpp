#include "doctest.h"

#include "orecast/arima.hpp"
#include "orecast/error.hpp"
#include "support/oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace orecast;
using namespace orecast::arima;

using support::gaussian_logpdf;

namespace {

constexpr double kZ975 = 1.959963984540054;

// Autocovariance matrix of a stationary ARMA(1,1) with w = phi w + e + theta e(-1).
Eigen::MatrixXd arma11_cov(std::size_t n, double phi, double theta, double sigma2) {
	std::vector<double> gamma(n);
	gamma[0] = sigma2 * (1.0 + 2.0 * phi * theta + theta * theta) / (1.0 - phi * phi);
	if (n > 1) {
		gamma[1] = sigma2 * (1.0 + phi * theta) * (phi + theta) / (1.0 - phi * phi);
	}
	for (std::size_t k = 2; k < n; ++k) {
		gamma[k] = phi * gamma[k - 1];
	}
	Eigen::MatrixXd cov(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < n; ++j) {
			cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gamma[i > j ? i - j : j - i];
		}
	}
	return cov;
}

ArimaFit hand_fit(ArimaSpec spec, double c, std::vector<double> phi, std::vector<double> theta, double sigma2,
                  std::vector<double> series, std::vector<double> resid) {
	TimeSeries s(std::move(series), {2000, 1}, Frequency::Annual, "TMF");
	auto diffed = series::difference(s, spec.d);
	return ArimaFit{.spec = spec,
	                .c = c,
	                .phi = std::move(phi),
	                .theta = std::move(theta),
	                .sigma2 = sigma2,
	                .residuals = diffed.with_values(std::move(resid)),
	                .loglik = 0.0,
	                .aic = 0.0,
	                .n_effective = diffed.size(),
	                .series = s};
}

} // namespace

TEST_CASE("stationarity transform round trips and stays stationary") {
	std::mt19937_64 rng(5);
	std::normal_distribution<double> normal(0.0, 1.0);
	for (int trial = 0; trial < 200; ++trial) {
		std::vector<double> raw(static_cast<std::size_t>(1 + trial % 5));
		for (auto &r : raw) {
			r = normal(rng);
		}
		const auto coef = to_stationary(raw);
		REQUIRE(roots_outside_unit_circle(coef));
		const auto back = from_stationary(coef);
		for (std::size_t i = 0; i < raw.size(); ++i) {
			REQUIRE(back[i] == doctest::Approx(raw[i]).epsilon(1e-8));
		}
	}
	CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{1.0}));
	CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{0.5, 0.6}));
	CHECK(roots_outside_unit_circle(std::vector<double>{0.5, 0.3}));
}

TEST_CASE("Kalman AR(1) likelihood equals the joint Gaussian density") {
	for (double phi : {-0.8, -0.3, 0.0, 0.4, 0.7, 0.95}) {
		for (std::size_t n = 1; n <= 8; ++n) {
			const auto sim = simulate_arima({.spec = {1, 0, 0}, .c = 0.0, .phi = {phi}, .theta = {}, .sigma2 = 1.7},
			                                n, 100 + n);
			std::vector<double> x(sim.values().begin(), sim.values().end());
			const double sigma2 = 1.7;
			const auto cov = support::ar1_cov(n, phi, sigma2);
			const std::vector<double> ph{phi};
			CHECK(std::abs(arma_loglik(x, ph, {}, sigma2) - gaussian_logpdf(x, cov)) < 1e-6);
		}
	}
}

TEST_CASE("Kalman ARMA(1,1) likelihood equals the joint Gaussian density") {
	const std::vector<double> x{0.3, -1.2, 0.8, 2.1, 0.4, -0.6, -1.9, 0.2, 1.1, 0.05};
	for (double phi : {-0.5, 0.0, 0.6}) {
		for (double theta : {-0.7, 0.2, 0.9}) {
			const std::vector<double> ph{phi};
			const std::vector<double> th{theta};
			CHECK(std::abs(arma_loglik(x, ph, th, 0.8) - gaussian_logpdf(x, arma11_cov(x.size(), phi, theta, 0.8))) <
			      1e-8);
		}
	}
}

TEST_CASE("fit_arima recovers AR(1)") {
	const auto y = simulate_arima({.spec = {1, 0, 0}, .c = 0.0, .phi = {0.7}, .theta = {}, .sigma2 = 1.0}, 500, 1);
	const auto fit = fit_arima(y, {1, 0, 0});
	CHECK(fit.phi.size() == 1);
	CHECK(fit.phi[0] >= 0.6);
	CHECK(fit.phi[0] <= 0.8);
	CHECK(fit.sigma2 > 0.0);
	CHECK(fit.residuals.size() == fit.n_effective);
	CHECK(fit.n_effective == 500);
	CHECK(fit.aic == doctest::Approx(2.0 * 3 - 2.0 * fit.loglik));
}

TEST_CASE("fit_arima white noise matches the Gaussian MLE") {
	std::mt19937_64 rng(77);
	std::normal_distribution<double> normal(3.0, 1.0);
	std::vector<double> v(500);
	for (auto &x : v) {
		x = normal(rng);
	}
	const double n = 500.0;
	const double mean = series::mean(v);
	double ss = 0.0;
	for (double x : v) {
		ss += (x - mean) * (x - mean);
	}
	const auto fit = fit_arima(TimeSeries(v), {0, 0, 0});
	CHECK(std::abs(fit.c - mean) <= 3.0 / std::sqrt(n));
	CHECK(fit.c == doctest::Approx(mean).epsilon(1e-12));
	CHECK(fit.sigma2 == doctest::Approx(ss / n).epsilon(1e-12));
	CHECK(std::abs(fit.sigma2 - 1.0) < 0.15);
	CHECK(fit.loglik == doctest::Approx(-0.5 * n * (std::log(2.0 * std::numbers::pi * ss / n) + 1.0)));
}

TEST_CASE("fit_arima error paths") {
	CHECK_THROWS_AS(fit_arima(TimeSeries(std::vector<double>(30, 4.0)), {1, 0, 0}), DegenerateError);
	CHECK_THROWS_AS(fit_arima(TimeSeries(std::vector<double>(30, 4.0)), {0, 1, 1}), DegenerateError);
	CHECK_THROWS_AS(fit_arima(TimeSeries(std::vector<double>{1, 2, 3, 4, 5, 6, 7}), {0, 0, 0}), TooShortError);
	CHECK_THROWS_AS(fit_arima(TimeSeries(std::vector<double>(30, 4.0)), {6, 0, 0}), ParamError);
	try {
		fit_arima(TimeSeries(std::vector<double>(10, 1.0)), {2, 1, 2});
		FAIL("expected TooShortError");
	} catch (const TooShortError &e) {
		CHECK(e.required() == 15);
		CHECK(e.actual() == 10);
	}
}

TEST_CASE("forecast_arima AR(1) closed form") {
	// c = 0, phi = 0.5, y_T = 2
	auto fit = hand_fit({1, 0, 0}, 0.0, {0.5}, {}, 1.0, {0.4, -1.0, 2.0}, {0.1, -1.2, 2.5});
	const auto fc = forecast_arima(fit, 3, 0.95);
	CHECK(fc.mean == std::vector<double>{1.0, 0.5, 0.25});
	CHECK(fc.upper[0] - fc.mean[0] == doctest::Approx(kZ975).epsilon(1e-12));
	CHECK(fc.upper[1] - fc.mean[1] == doctest::Approx(kZ975 * std::sqrt(1.25)).epsilon(1e-12));
	CHECK(fc.mean[0] - fc.lower[0] == doctest::Approx(kZ975).epsilon(1e-12));
	CHECK(fc.horizon == 3);
	CHECK(fc.unit == "TMF");
	CHECK(fc.start.year == 2003);
}

TEST_CASE("forecast_arima MA(1) remembers one step") {
	auto fit = hand_fit({0, 0, 1}, 0.0, {}, {0.5}, 1.0, {0.3, -0.2, 1.0}, {0.1, 0.4, 2.0});
	const auto fc = forecast_arima(fit, 4);
	CHECK(fc.mean == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("forecast_arima random walk repeats the last value") {
	auto fit = hand_fit({0, 1, 0}, 0.0, {}, {}, 2.0, {1, 4, 2, 7, 9}, {3, -2, 5, 2});
	const auto fc = forecast_arima(fit, 6);
	for (double m : fc.mean) {
		CHECK(m == 9.0);
	}
	// psi weights of (1-B)^-1 are all 1, so var_h = sigma2 * h
	for (int h = 1; h <= 6; ++h) {
		CHECK(fc.upper[static_cast<std::size_t>(h - 1)] - 9.0 ==
		      doctest::Approx(kZ975 * std::sqrt(2.0 * h)).epsilon(1e-12));
	}
	CHECK_THROWS_AS(forecast_arima(fit, 0), HorizonError);
	CHECK_THROWS_AS(forecast_arima(fit, 3, 1.0), ParamError);
}

TEST_CASE("psi weights") {
	const std::vector<double> phi{0.5};
	auto psi = psi_weights(phi, {}, 0, 4);
	CHECK(psi == std::vector<double>{1.0, 0.5, 0.25, 0.125});
	const std::vector<double> theta{0.4};
	psi = psi_weights({}, theta, 1, 4);
	CHECK(psi[0] == 1.0);
	CHECK(psi[1] == doctest::Approx(1.4));
	CHECK(psi[3] == doctest::Approx(1.4));
	psi = psi_weights({}, {}, 2, 4);
	CHECK(psi == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("forecast interval half-widths are nondecreasing (property)") {
	for (std::uint64_t seed = 0; seed < 10; ++seed) {
		const auto y = simulate_arima({.spec = {1, 1, 1}, .c = 0.0, .phi = {0.3}, .theta = {0.4}, .sigma2 = 1.0}, 80,
		                              seed);
		for (ArimaSpec spec : {ArimaSpec{1, 1, 1}, ArimaSpec{2, 0, 1}, ArimaSpec{0, 2, 1}}) {
			const auto fit = fit_arima(y, spec);
			const auto fc = forecast_arima(fit, 12, 0.9);
			for (std::size_t h = 0; h < fc.mean.size(); ++h) {
				REQUIRE(fc.lower[h] <= fc.mean[h]);
				REQUIRE(fc.mean[h] <= fc.upper[h]);
				if (h > 0) {
					REQUIRE(fc.upper[h] - fc.mean[h] >= fc.upper[h - 1] - fc.mean[h - 1] - 1e-12);
				}
			}
		}
	}
}

TEST_CASE("simulate_arima contracts") {
	const auto flat = simulate_arima({.spec = {0, 0, 0}, .c = 5.0, .phi = {}, .theta = {}, .sigma2 = 0.0}, 4, 9);
	CHECK(std::vector<double>(flat.values().begin(), flat.values().end()) == std::vector<double>{5, 5, 5, 5});

	const ArimaParams p{.spec = {1, 0, 1}, .c = 0.3, .phi = {0.4}, .theta = {0.2}, .sigma2 = 2.0};
	const auto a = simulate_arima(p, 50, 1234);
	const auto b = simulate_arima(p, 50, 1234);
	CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

	const auto ar = simulate_arima({.spec = {1, 0, 0}, .c = 0.0, .phi = {0.7}, .theta = {}, .sigma2 = 1.0}, 10000, 99);
	CHECK(std::abs(series::acf(ar, 1).coefficients[0] - 0.7) <= 0.03);

	CHECK_THROWS_AS(simulate_arima({.spec = {1, 0, 0}, .c = 0, .phi = {1.0}, .theta = {}, .sigma2 = 1.0}, 5, 1),
	                ParamError);
	CHECK_THROWS_AS(simulate_arima({.spec = {0, 0, 1}, .c = 0, .phi = {}, .theta = {1.5}, .sigma2 = 1.0}, 5, 1),
	                ParamError);
}

TEST_CASE("auto_arima picks d by the variance rule") {
	std::mt19937_64 rng(31);
	std::normal_distribution<double> normal;
	std::vector<double> trend(200);
	for (std::size_t t = 0; t < trend.size(); ++t) {
		trend[t] = 3.0 * static_cast<double>(t) + normal(rng);
	}
	CHECK(select_differencing(trend) == 1);
	const auto fit = auto_arima(TimeSeries(trend));
	CHECK(fit.spec.d == 1);

	CHECK_THROWS_AS(auto_arima(TimeSeries(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9})), TooShortError);
}

TEST_CASE("auto_arima on AR(1) data keeps d = 0") {
	const auto y = simulate_arima({.spec = {1, 0, 0}, .c = 0.0, .phi = {0.7}, .theta = {}, .sigma2 = 1.0}, 500, 3);
	const auto fit = auto_arima(y);
	CHECK(fit.spec.d == 0);
	CHECK(fit.spec.p >= 1);
}

TEST_CASE("AIC selection ignores an added constant when d >= 1") {
	const auto base = simulate_arima({.spec = {1, 1, 0}, .c = 0.0, .phi = {0.5}, .theta = {}, .sigma2 = 1.0}, 120, 8);
	std::vector<double> ints(base.size());
	std::vector<double> shifted(base.size());
	for (std::size_t i = 0; i < base.size(); ++i) {
		ints[i] = std::round(base[i] * 64.0);
		shifted[i] = ints[i] + 4096.0;
	}
	const auto a = auto_arima(TimeSeries(ints));
	const auto b = auto_arima(TimeSeries(shifted));
	REQUIRE(a.spec.d >= 1);
	CHECK(a.spec == b.spec);
	CHECK(a.aic == b.aic);
}

TEST_CASE("ARMA(1,1) parameters recovered within 3 standard errors") {
	const double phi = 0.5;
	const double theta = 0.3;
	const double n = 2000.0;
	const double factor = (1.0 + phi * theta) * (1.0 + phi * theta) / ((phi + theta) * (phi + theta) * n);
	const double se_phi = std::sqrt((1.0 - phi * phi) * factor);
	const double se_theta = std::sqrt((1.0 - theta * theta) * factor);
	const double se_sigma2 = std::sqrt(2.0 / n);
	int good = 0;
	for (std::uint64_t seed = 0; seed < 20; ++seed) {
		const auto y = simulate_arima(
		    {.spec = {1, 0, 1}, .c = 0.0, .phi = {phi}, .theta = {theta}, .sigma2 = 1.0}, 2000, 500 + seed);
		const auto fit = fit_arima(y, {1, 0, 1});
		const bool ok = std::abs(fit.phi[0] - phi) <= 3 * se_phi && std::abs(fit.theta[0] - theta) <= 3 * se_theta &&
		                std::abs(fit.sigma2 - 1.0) <= 3 * se_sigma2;
		good += ok ? 1 : 0;
	}
	CHECK(good >= 18);
}
