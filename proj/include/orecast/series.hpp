#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace orecast {

enum class Frequency : int { Annual = 1, Monthly = 12 };

/// A calendar position. `month` is 1..12 for monthly data and ignored
/// (kept at 1) for annual data.
struct CalendarPoint {
	int year = 0;
	int month = 1;

	/// Moves `periods` steps forward (negative moves back). Monthly
	/// points wrap December into January of the next year.
	CalendarPoint advance(long periods, Frequency freq) const;

	/// Number of periods from `*this` to `other`.
	long periods_until(const CalendarPoint &other, Frequency freq) const;

	auto operator<=>(const CalendarPoint &) const = default;
};

/// Ordered, finite observations with a calendar start and frequency.
class TimeSeries {
public:
	explicit TimeSeries(std::vector<double> values, CalendarPoint start = {}, Frequency freq = Frequency::Annual,
	           std::string unit = {});

	std::span<const double> values() const noexcept { return values_; }
	std::size_t size() const noexcept { return values_.size(); }
	double operator[](std::size_t i) const { return values_[i]; }
	double back() const { return values_.back(); }

	const CalendarPoint &start() const noexcept { return start_; }
	CalendarPoint end() const { return start_.advance(static_cast<long>(values_.size()) - 1, freq_); }
	Frequency frequency() const noexcept { return freq_; }
	const std::string &unit() const noexcept { return unit_; }

	/// Same calendar metadata, new values and start offset by `shift` periods.
	TimeSeries with_values(std::vector<double> values, long shift = 0) const;

private:
	std::vector<double> values_;
	CalendarPoint start_;
	Frequency freq_;
	std::string unit_;
};

struct AcfResult {
	std::vector<int> lags;
	std::vector<double> coefficients;
	std::size_t n = 0;
};

namespace series {

std::vector<double> difference(std::span<const double> values, int d);

/// Applies `d` differences. The start advances by `d` periods.
TimeSeries difference(const TimeSeries &s, int d);

/// Undoes `d` differences given the last `d` original values preceding
/// the differenced block (oldest first). Returns only the reconstructed
/// values, i.e. the same length as `diffed`.
std::vector<double> inverse_difference(std::span<const double> diffed, std::span<const double> anchors, int d);

/// TimeSeries overload. The returned series starts `d` periods before
/// `diffed` and includes the anchors, so it has the original length.
TimeSeries inverse_difference(const TimeSeries &diffed, std::span<const double> anchors, int d);

/// Sample autocorrelation with divisor n at lags 1..max_lag.
AcfResult acf(std::span<const double> values, int max_lag);
AcfResult acf(const TimeSeries &s, int max_lag);

/// Population z-scores; gaps (nullopt) stay gaps.
std::vector<std::optional<double>> znormalize(std::span<const std::optional<double>> values);

double mean(std::span<const double> values);

/// Sample variance, divisor n - 1. Zero for fewer than two values.
double variance(std::span<const double> values);

} // namespace series
} // namespace orecast
