#pragma once

#include "orecast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace support {

// Independent k-NN rule: z-scores per (mineral, unit) group and month,
// then a scan over every row for each gap.
inline std::map<std::pair<std::size_t, std::size_t>, double>
knn_oracle(const std::vector<orecast::ingest::ProductionRecord> &recs, int k) {
	const std::size_t n = recs.size();
	auto group = [&](std::size_t i) { return std::make_pair(recs[i].mineral, recs[i].unit); };
	std::map<std::pair<std::pair<std::string, std::string>, std::size_t>, std::pair<double, double>> stats;
	{
		std::map<std::pair<std::pair<std::string, std::string>, std::size_t>, std::vector<double>> vals;
		for (std::size_t i = 0; i < n; ++i) {
			for (std::size_t m = 0; m < 12; ++m) {
				if (recs[i].months[m]) {
					vals[{group(i), m}].push_back(*recs[i].months[m]);
				}
			}
		}
		for (const auto &[key, v] : vals) {
			double mean = 0.0;
			for (double x : v) {
				mean += x;
			}
			mean /= static_cast<double>(v.size());
			double var = 0.0;
			for (double x : v) {
				var += (x - mean) * (x - mean);
			}
			stats[key] = {mean, std::sqrt(var / static_cast<double>(v.size()))};
		}
	}
	auto zscore = [&](std::size_t i, std::size_t m) {
		const auto [mean, sd] = stats.at({group(i), m});
		return sd > 0.0 ? (*recs[i].months[m] - mean) / sd : 0.0;
	};

	std::map<std::pair<std::size_t, std::size_t>, double> out;
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t m = 0; m < 12; ++m) {
			if (recs[i].months[m]) {
				continue;
			}
			std::vector<std::tuple<double, std::size_t>> cands;
			for (std::size_t j = 0; j < n; ++j) {
				if (j == i || group(i) != group(j) || !recs[j].months[m]) {
					continue;
				}
				double ss = 0.0;
				int shared = 0;
				for (std::size_t c = 0; c < 12; ++c) {
					if (recs[i].months[c] && recs[j].months[c]) {
						ss += std::pow(zscore(i, c) - zscore(j, c), 2);
						++shared;
					}
				}
				if (shared > 0) {
					cands.emplace_back(std::sqrt(ss) / shared, j);
				}
			}
			if (cands.empty()) {
				continue;
			}
			std::sort(cands.begin(), cands.end());
			double sum = 0.0;
			const std::size_t use = std::min<std::size_t>(cands.size(), static_cast<std::size_t>(k));
			for (std::size_t t = 0; t < use; ++t) {
				sum += *recs[std::get<1>(cands[t])].months[m];
			}
			out[{i, m}] = sum / static_cast<double>(use);
		}
	}
	return out;
}

} // namespace support
