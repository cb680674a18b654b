#include "orecast/series.hpp"

#include "orecast/error.hpp"

#include <cmath>
#include <numeric>

namespace orecast {

CalendarPoint CalendarPoint::advance(long periods, Frequency freq) const {
	if (freq == Frequency::Annual) {
		return {static_cast<int>(year + periods), month};
	}
	long idx = static_cast<long>(year) * 12 + (month - 1) + periods;
	long y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
	return {static_cast<int>(y), static_cast<int>(idx - y * 12) + 1};
}

long CalendarPoint::periods_until(const CalendarPoint &other, Frequency freq) const {
	if (freq == Frequency::Annual) {
		return other.year - year;
	}
	return (static_cast<long>(other.year) * 12 + other.month) - (static_cast<long>(year) * 12 + month);
}

TimeSeries::TimeSeries(std::vector<double> values, CalendarPoint start, Frequency freq, std::string unit)
    : values_(std::move(values)), start_(start), freq_(freq), unit_(std::move(unit)) {
	if (values_.empty()) {
		throw LengthError("time series must hold at least one value");
	}
	for (std::size_t i = 0; i < values_.size(); ++i) {
		if (!std::isfinite(values_[i])) {
			throw ParamError("time series value at index " + std::to_string(i) + " is not finite");
		}
	}
	if (freq_ == Frequency::Annual) {
		start_.month = 1;
	} else if (start_.month < 1 || start_.month > 12) {
		throw ParamError("monthly start month must be in 1..12");
	}
}

TimeSeries TimeSeries::with_values(std::vector<double> values, long shift) const {
	return TimeSeries(std::move(values), start_.advance(shift, freq_), freq_, unit_);
}

namespace series {

std::vector<double> difference(std::span<const double> values, int d) {
	if (d < 0) {
		throw LengthError("differencing order must be non-negative");
	}
	if (values.size() <= static_cast<std::size_t>(d)) {
		throw LengthError("series of length " + std::to_string(values.size()) + " cannot be differenced " +
		                  std::to_string(d) + " time(s)");
	}
	std::vector<double> out(values.begin(), values.end());
	for (int pass = 0; pass < d; ++pass) {
		for (std::size_t i = 0; i + 1 < out.size(); ++i) {
			out[i] = out[i + 1] - out[i];
		}
		out.pop_back();
	}
	return out;
}

TimeSeries difference(const TimeSeries &s, int d) {
	return s.with_values(difference(s.values(), d), d);
}

std::vector<double> inverse_difference(std::span<const double> diffed, std::span<const double> anchors, int d) {
	if (d < 0 || anchors.size() != static_cast<std::size_t>(d)) {
		throw AnchorError("inverse differencing of order " + std::to_string(d) + " needs exactly " +
		                  std::to_string(d) + " anchor(s), got " + std::to_string(anchors.size()));
	}
	std::vector<double> out(diffed.begin(), diffed.end());
	// Peel one differencing level per pass. At level `lvl` the anchor is the
	// last value of the (lvl)-times differenced original prefix.
	std::vector<double> tail(anchors.begin(), anchors.end());
	for (int level = d - 1; level >= 0; --level) {
		auto prefix = difference(std::span<const double>(tail), level);
		double prev = prefix.back();
		for (double &v : out) {
			v += prev;
			prev = v;
		}
	}
	return out;
}

TimeSeries inverse_difference(const TimeSeries &diffed, std::span<const double> anchors, int d) {
	auto rebuilt = inverse_difference(diffed.values(), anchors, d);
	std::vector<double> full(anchors.begin(), anchors.end());
	full.insert(full.end(), rebuilt.begin(), rebuilt.end());
	return diffed.with_values(std::move(full), -d);
}

double mean(std::span<const double> values) {
	if (values.empty()) {
		return 0.0;
	}
	return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
	if (values.size() < 2) {
		return 0.0;
	}
	const double m = mean(values);
	double ss = 0.0;
	for (double v : values) {
		ss += (v - m) * (v - m);
	}
	return ss / static_cast<double>(values.size() - 1);
}

AcfResult acf(std::span<const double> values, int max_lag) {
	const std::size_t n = values.size();
	if (max_lag < 1 || static_cast<std::size_t>(max_lag) >= n) {
		throw LagError("max_lag must be in 1.." + std::to_string(n > 0 ? n - 1 : 0) + ", got " +
		               std::to_string(max_lag));
	}
	const double m = mean(values);
	double denom = 0.0;
	for (double v : values) {
		denom += (v - m) * (v - m);
	}
	if (!(denom > 0.0)) {
		throw DegenerateError("autocorrelation undefined for a zero-variance series");
	}

	AcfResult out;
	out.n = n;
	out.lags.reserve(static_cast<std::size_t>(max_lag));
	out.coefficients.reserve(static_cast<std::size_t>(max_lag));
	for (int k = 1; k <= max_lag; ++k) {
		double num = 0.0;
		for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t) {
			num += (values[t] - m) * (values[t + static_cast<std::size_t>(k)] - m);
		}
		out.lags.push_back(k);
		out.coefficients.push_back(num / denom);
	}
	return out;
}

AcfResult acf(const TimeSeries &s, int max_lag) { return acf(s.values(), max_lag); }

std::vector<std::optional<double>> znormalize(std::span<const std::optional<double>> values) {
	double sum = 0.0;
	std::size_t count = 0;
	for (const auto &v : values) {
		if (v) {
			sum += *v;
			++count;
		}
	}
	if (count < 2) {
		throw DegenerateError("z-normalization needs at least two observed values");
	}
	const double m = sum / static_cast<double>(count);
	double ss = 0.0;
	for (const auto &v : values) {
		if (v) {
			ss += (*v - m) * (*v - m);
		}
	}
	const double sd = std::sqrt(ss / static_cast<double>(count));
	if (!(sd > 0.0)) {
		throw DegenerateError("z-normalization undefined for zero spread");
	}
	std::vector<std::optional<double>> out(values.size());
	for (std::size_t i = 0; i < values.size(); ++i) {
		if (values[i]) {
			out[i] = (*values[i] - m) / sd;
		}
	}
	return out;
}

} // namespace series
} // namespace orecast
