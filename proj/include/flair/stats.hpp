#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flair/rng.hpp"

namespace flair {

inline double geomean_from_logs(std::span<const double> log_values) {
	if (log_values.empty()) {
		throw std::invalid_argument("geomean_from_logs: empty input");
	}
	double mean = 0.0;
	for (double v : log_values) mean += v;
	return std::exp(mean / static_cast<double>(log_values.size()));
}

// Linear-interpolation percentile of a sorted vector.
inline double percentile_sorted(std::span<const double> sorted, double q) {
	const int s = static_cast<int>(sorted.size());
	const double pos = q * (s - 1);
	const int lo = static_cast<int>(std::floor(pos));
	const int hi = std::min(lo + 1, s - 1);
	return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

struct BootstrapCI {
	double point = 1.0;
	double lo = 1.0;
	double hi = 1.0;
	int b = 0;
	bool degenerate = false;  // fewer than two families
};

// Grouped paired bootstrap: resample dataset families with replacement and
// recompute the geometric-mean ratio; percentile 95% interval.
inline BootstrapCI grouped_paired_bootstrap(std::span<const double> log_ratios,
                                            std::span<const std::string> families,
                                            int b = 10000, std::uint64_t seed = 0) {
	if (log_ratios.size() != families.size() || log_ratios.empty()) {
		throw std::invalid_argument("grouped_paired_bootstrap: input length mismatch");
	}
	BootstrapCI out;
	out.b = b;
	out.point = geomean_from_logs(log_ratios);

	std::map<std::string, std::vector<double>> groups;
	for (std::size_t i = 0; i < log_ratios.size(); ++i) {
		groups[std::string(families[i])].push_back(log_ratios[i]);
	}
	std::vector<std::vector<double>> family_values;
	family_values.reserve(groups.size());
	for (auto& [name, values] : groups) {
		family_values.push_back(std::move(values));
	}
	const std::size_t n_fam = family_values.size();
	if (n_fam < 2) {
		out.degenerate = true;
		out.lo = out.hi = out.point;
		return out;
	}

	Rng rng(seed);
	std::vector<double> stats(b);
	for (int rep = 0; rep < b; ++rep) {
		Rng rep_rng = rng.fork(static_cast<std::uint64_t>(rep));
		double sum = 0.0;
		std::size_t count = 0;
		for (std::size_t f = 0; f < n_fam; ++f) {
			const auto& chosen = family_values[rep_rng.index(n_fam)];
			for (double v : chosen) sum += v;
			count += chosen.size();
		}
		stats[rep] = std::exp(sum / static_cast<double>(count));
	}
	std::sort(stats.begin(), stats.end());
	out.lo = percentile_sorted(stats, 0.025);
	out.hi = percentile_sorted(stats, 0.975);
	return out;
}

// Holm step-down adjustment: sorted ascending, adj_(i) = max over j<=i of
// min(1, (m-j+1) p_(j)).
inline std::vector<double> holm_adjust(std::span<const double> p_values) {
	const int m = static_cast<int>(p_values.size());
	std::vector<int> order(m);
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(),
	          [&](int a, int b) { return p_values[a] < p_values[b]; });
	std::vector<double> adjusted(m);
	double running_max = 0.0;
	for (int rank = 0; rank < m; ++rank) {
		const double scaled = std::min(1.0, (m - rank) * p_values[order[rank]]);
		running_max = std::max(running_max, scaled);
		adjusted[order[rank]] = running_max;
	}
	return adjusted;
}

// Two-sided paired sign-flip permutation p-value on the mean of the
// differences, with the add-one correction.
inline double sign_flip_pvalue(std::span<const double> diffs, int flips = 10000,
                               std::uint64_t seed = 0) {
	if (diffs.empty()) {
		return 1.0;
	}
	const double n = static_cast<double>(diffs.size());
	double observed = 0.0;
	for (double d : diffs) observed += d;
	observed = std::abs(observed / n);

	Rng rng(seed);
	int at_least = 0;
	for (int rep = 0; rep < flips; ++rep) {
		double sum = 0.0;
		for (double d : diffs) {
			sum += (rng.next_u64() & 1ULL) ? d : -d;
		}
		if (std::abs(sum / n) >= observed - 1e-15) {
			++at_least;
		}
	}
	return (1.0 + at_least) / (1.0 + flips);
}

}  // namespace flair
