#pragma once

// Reference computations written independently of the library.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace support {

inline std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> d(mean, sd);
	std::vector<double> x(n);
	for (auto &v : x) {
		v = d(rng);
	}
	return x;
}

// Values on a 1/1024 grid with bounded magnitude: sums and differences
// of these are exact in binary floating point.
inline std::vector<double> dyadic_series(std::mt19937_64 &rng, std::size_t n) {
	std::uniform_int_distribution<long> ticks(-4'000'000, 4'000'000);
	std::vector<double> v(n);
	for (auto &x : v) {
		x = static_cast<double>(ticks(rng)) / 1024.0;
	}
	return v;
}

/// Log-density of a zero-mean Gaussian vector with covariance `cov`.
inline double gaussian_logpdf(const Eigen::VectorXd &x, const Eigen::MatrixXd &cov) {
	Eigen::LLT<Eigen::MatrixXd> llt(cov);
	const Eigen::MatrixXd l = llt.matrixL();
	double logdet = 0.0;
	for (Eigen::Index i = 0; i < x.size(); ++i) {
		logdet += 2.0 * std::log(l(i, i));
	}
	return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + logdet + x.dot(llt.solve(x)));
}

inline double gaussian_logpdf(const std::vector<double> &x, const Eigen::MatrixXd &cov) {
	return gaussian_logpdf(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())), cov);
}

/// Stationary AR(1) covariance: sigma2 phi^|i-j| / (1 - phi^2).
inline Eigen::MatrixXd ar1_cov(std::size_t n, double phi, double sigma2) {
	Eigen::MatrixXd cov(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < n; ++j) {
			const double lag = static_cast<double>(i > j ? i - j : j - i);
			cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
			    sigma2 * std::pow(phi, lag) / (1.0 - phi * phi);
		}
	}
	return cov;
}

// Diffuse local-level likelihood: density of y_i - y_1, i >= 2, whose
// covariance is q (min(i,j) - 1) + r (delta_ij + 1).
inline double local_level_oracle(const std::vector<double> &y, double q, double r) {
	const auto m = static_cast<Eigen::Index>(y.size() - 1);
	Eigen::VectorXd z(m);
	Eigen::MatrixXd cov(m, m);
	for (Eigen::Index i = 0; i < m; ++i) {
		z(i) = y[static_cast<std::size_t>(i) + 1] - y[0];
		for (Eigen::Index j = 0; j < m; ++j) {
			cov(i, j) = q * static_cast<double>(std::min(i, j) + 1) + r * ((i == j ? 1.0 : 0.0) + 1.0);
		}
	}
	return gaussian_logpdf(z, cov);
}

// Textbook evaluation, independent of the library's acf.
inline double ljung_box_oracle(const std::vector<double> &x, int h) {
	const double n = static_cast<double>(x.size());
	double m = 0.0;
	for (double v : x) {
		m += v;
	}
	m /= n;
	double c0 = 0.0;
	for (double v : x) {
		c0 += (v - m) * (v - m);
	}
	double q = 0.0;
	for (int k = 1; k <= h; ++k) {
		double ck = 0.0;
		for (std::size_t t = static_cast<std::size_t>(k); t < x.size(); ++t) {
			ck += (x[t] - m) * (x[t - static_cast<std::size_t>(k)] - m);
		}
		const double r = ck / c0;
		q += r * r / (n - k);
	}
	return n * (n + 2.0) * q;
}

} // namespace support
