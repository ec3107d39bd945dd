#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace flair {

namespace constants {
// Minimum positive observations required to estimate lambda; below this the
// transform is the identity.
inline constexpr int kMinPositiveForBoxCox = 10;
// Clip on the inverse exponent to avoid overflow on extreme forecasts.
inline constexpr double kBoxCoxExpClip = 30.0;
}  // namespace constants

struct BoxCox {
	double lambda = 1.0;
};

inline double box_cox_forward(double x, double lambda) {
	if (lambda == 0.0) {
		return std::log(x);
	}
	return (std::pow(x, lambda) - 1.0) / lambda;
}

inline double box_cox_inverse(double z, double lambda,
                              double exp_clip = constants::kBoxCoxExpClip) {
	if (lambda == 0.0) {
		return std::exp(std::clamp(z, -exp_clip, exp_clip));
	}
	const double base = std::max(lambda * z + 1.0, 1e-300);
	const double exponent = std::clamp(std::log(base) / lambda, -exp_clip, exp_clip);
	return std::exp(exponent);
}

// Profile-likelihood MLE of lambda over a 101-point uniform grid on [0, 1].
// Falls back to the identity when fewer than `min_positive` positive
// observations exist or the transformed sequence is degenerate.
inline BoxCox box_cox_fit(std::span<const double> level,
                          int min_positive = constants::kMinPositiveForBoxCox) {
	const std::size_t n = level.size();
	int positive = 0;
	double log_sum = 0.0;
	for (double v : level) {
		if (v > 0.0) {
			++positive;
			log_sum += std::log(v);
		}
	}
	if (positive < min_positive || positive != static_cast<int>(n)) {
		return BoxCox{1.0};
	}

	constexpr int kGridPoints = 101;
	double best_lambda = 1.0;
	double best_ll = -std::numeric_limits<double>::infinity();
	std::vector<double> transformed(n);
	for (int g = 0; g < kGridPoints; ++g) {
		const double lambda = static_cast<double>(g) / (kGridPoints - 1);
		double mean = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			transformed[i] = box_cox_forward(level[i], lambda);
			mean += transformed[i];
		}
		mean /= static_cast<double>(n);
		double ss = 0.0;
		for (double z : transformed) ss += (z - mean) * (z - mean);
		const double variance = ss / static_cast<double>(n);
		// A relative floor keeps rounding noise on constant sequences from
		// masquerading as a likelihood signal.
		if (!(variance > 1e-24 * (mean * mean + 1e-300)) || !std::isfinite(variance)) {
			continue;
		}
		const double ll = -0.5 * static_cast<double>(n) * std::log(variance) + (lambda - 1.0) * log_sum;
		if (ll > best_ll) {
			best_ll = ll;
			best_lambda = lambda;
		}
	}
	if (!std::isfinite(best_ll)) {
		return BoxCox{1.0};
	}
	return BoxCox{best_lambda};
}

}  // namespace flair
