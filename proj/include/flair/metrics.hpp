#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace flair {

// Repeat the last observed cycle; the unit baseline for all relative metrics.
// Falls back to last-value carry-forward when fewer than P points exist.
inline std::vector<double> seasonal_naive(std::span<const double> train, int period, int horizon) {
	if (train.empty()) {
		throw std::invalid_argument("seasonal_naive: empty training series");
	}
	const int n = static_cast<int>(train.size());
	const int p = (period >= 1 && period <= n) ? period : 1;
	std::vector<double> out(horizon);
	for (int h = 1; h <= horizon; ++h) {
		out[h - 1] = train[n - p + ((h - 1) % p)];
	}
	return out;
}

// Mean absolute error scaled by the in-sample seasonal-naive MAE at lag m.
// Returns nullopt when the scaling denominator is degenerate (the config is
// then flagged and excluded rather than crashing the run).
inline std::optional<double> mase(std::span<const double> actual, std::span<const double> forecast,
                                  std::span<const double> train, int m) {
	if (actual.size() != forecast.size() || actual.empty()) {
		throw std::invalid_argument("mase: actual/forecast length mismatch");
	}
	if (m < 1 || train.size() <= static_cast<std::size_t>(m)) {
		throw std::invalid_argument("mase: train length must exceed the scaling lag");
	}
	double denom = 0.0;
	for (std::size_t t = m; t < train.size(); ++t) {
		denom += std::abs(train[t] - train[t - m]);
	}
	denom /= static_cast<double>(train.size() - m);
	if (!(denom > 0.0) || !std::isfinite(denom)) {
		return std::nullopt;
	}
	double err = 0.0;
	for (std::size_t h = 0; h < actual.size(); ++h) {
		err += std::abs(actual[h] - forecast[h]);
	}
	return err / static_cast<double>(actual.size()) / denom;
}

// Sample CRPS: mean|X - a| - 0.5 mean|X - X'| with the pair mean over all
// ordered pairs, computed by the exact sorted O(s log s) identity.
inline double sample_crps(double actual, std::span<const double> samples) {
	const int s = static_cast<int>(samples.size());
	if (s < 1) {
		throw std::invalid_argument("sample_crps: need at least one sample");
	}
	std::vector<double> sorted(samples.begin(), samples.end());
	std::sort(sorted.begin(), sorted.end());
	double abs_err = 0.0;
	double pair_sum = 0.0;  // sum over i<j of (x_(j) - x_(i))
	for (int i = 0; i < s; ++i) {
		abs_err += std::abs(sorted[i] - actual);
		pair_sum += (2.0 * (i + 1) - 1.0 - s) * sorted[i];
	}
	const double mean_abs = abs_err / s;
	const double mean_pair = 2.0 * pair_sum / (static_cast<double>(s) * s);
	return mean_abs - 0.5 * mean_pair;
}

inline double pinball_loss(double actual, double predicted, double level) {
	const double u = actual - predicted;
	return u >= 0.0 ? level * u : (level - 1.0) * u;
}

// Weighted quantile loss over a per-step quantile matrix (levels x H),
// normalised by the total absolute actuals.
inline std::optional<double> wql(std::span<const double> actual, const Eigen::MatrixXd& quantile_matrix,
                                 std::span<const double> levels) {
	const int h = static_cast<int>(actual.size());
	if (quantile_matrix.cols() != h ||
	    quantile_matrix.rows() != static_cast<Eigen::Index>(levels.size())) {
		throw std::invalid_argument("wql: quantile matrix shape mismatch");
	}
	double denom = 0.0;
	for (double a : actual) denom += std::abs(a);
	if (!(denom > 0.0)) {
		return std::nullopt;
	}
	double loss = 0.0;
	for (std::size_t q = 0; q < levels.size(); ++q) {
		for (int t = 0; t < h; ++t) {
			loss += pinball_loss(actual[t], quantile_matrix(static_cast<Eigen::Index>(q), t),
			                     levels[q]);
		}
	}
	return 2.0 * loss / (static_cast<double>(levels.size()) * denom);
}

// Fraction of actuals inside the closed interval [lower, upper].
inline double interval_coverage(std::span<const double> actual, std::span<const double> lower,
                                std::span<const double> upper) {
	if (actual.size() != lower.size() || actual.size() != upper.size() || actual.empty()) {
		throw std::invalid_argument("interval_coverage: length mismatch");
	}
	int inside = 0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (actual[i] >= lower[i] && actual[i] <= upper[i]) ++inside;
	}
	return static_cast<double>(inside) / static_cast<double>(actual.size());
}

}  // namespace flair
