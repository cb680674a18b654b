#pragma once

namespace orecast::dist {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal upper tail, 1 - Phi(x), without cancellation.
double normal_sf(double x);

/// Standard normal quantile for p in (0, 1).
double normal_quantile(double p);

/// Chi-square CDF with `df` degrees of freedom (regularized lower
/// incomplete gamma P(df/2, x/2)).
double chisq_cdf(double x, double df);

/// Chi-square upper tail Q(df/2, x/2).
double chisq_sf(double x, double df);

} // namespace orecast::dist
