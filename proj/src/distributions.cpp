#include "orecast/distributions.hpp"

#include "orecast/error.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace orecast::dist {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
	if (!(p > 0.0 && p < 1.0)) {
		throw ParamError("normal quantile needs p in (0, 1)");
	}
	return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double chisq_cdf(double x, double df) {
	if (!(df > 0.0)) {
		throw ParamError("chi-square degrees of freedom must be positive");
	}
	if (x <= 0.0) {
		return 0.0;
	}
	return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

double chisq_sf(double x, double df) {
	if (!(df > 0.0)) {
		throw ParamError("chi-square degrees of freedom must be positive");
	}
	if (x <= 0.0) {
		return 1.0;
	}
	return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

} // namespace orecast::dist
