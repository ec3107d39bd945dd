#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "flair/boxcox.hpp"
#include "flair/period.hpp"
#include "flair/ridge.hpp"

namespace flair {

// Cycle-Level state: raw column sums, Box-Cox transform, optional secondary
// multiplicative index, and the last-value-centered innovations.
struct LevelSeries {
	Eigen::VectorXd raw;          // L_i, strictly positive
	double lambda = 1.0;          // Box-Cox exponent
	double exp_clip = constants::kBoxCoxExpClip;
	Eigen::VectorXd transformed;  // L^(lambda), after secondary division
	std::vector<double> sec_index;  // multiplicative index on the Box-Cox scale
	int sec = 0;                  // secondary lag in cycles; 0 = absent
	Eigen::VectorXd innovations;  // Z_i = transformed_i - transformed_{n_c}

	int n_cycles() const { return static_cast<int>(raw.size()); }
};

namespace detail {

inline void recenter(LevelSeries& level) {
	const int n = level.n_cycles();
	level.innovations = level.transformed.array() - level.transformed[n - 1];
}

}  // namespace detail

// Build the Level state from raw per-cycle sums: fit lambda, transform,
// and center at the last value (NLinear anchor).
inline LevelSeries build_level(const Eigen::VectorXd& raw,
                               int min_positive_bc = constants::kMinPositiveForBoxCox,
                               double exp_clip = constants::kBoxCoxExpClip) {
	LevelSeries out;
	out.raw = raw;
	out.exp_clip = exp_clip;
	out.lambda =
	    box_cox_fit(std::span<const double>(raw.data(), raw.size()), min_positive_bc).lambda;
	out.transformed.resize(raw.size());
	for (int i = 0; i < raw.size(); ++i) {
		out.transformed[i] = box_cox_forward(raw[i], out.lambda);
	}
	detail::recenter(out);
	return out;
}

// Divide out the secondary seasonality when a qualifying candidate exists:
// grouped means on the Box-Cox scale, normalised to average one. No-op when
// the precondition fails (the Ridge then runs with p = 3).
inline LevelSeries secondary_divide(LevelSeries level, const PeriodCandidates& candidates,
                                    int p_star) {
	const int n_c = level.n_cycles();
	const auto sec_opt = secondary_lag(candidates, p_star, n_c);
	if (!sec_opt) {
		return level;
	}
	const int sec = *sec_opt;
	std::vector<double> group_mean(sec, 0.0);
	std::vector<int> group_count(sec, 0);
	for (int i = 0; i < n_c; ++i) {
		group_mean[i % sec] += level.transformed[i];
		group_count[i % sec] += 1;
	}
	double overall = 0.0;
	for (int r = 0; r < sec; ++r) {
		group_mean[r] /= group_count[r];
		overall += group_mean[r];
	}
	overall /= sec;
	if (!(overall > 0.0)) {
		return level;  // degenerate scale; index must stay positive
	}
	std::vector<double> index(sec);
	for (int r = 0; r < sec; ++r) {
		index[r] = group_mean[r] / overall;
		if (!(index[r] > 0.0)) {
			return level;
		}
	}
	for (int i = 0; i < n_c; ++i) {
		level.transformed[i] /= index[i % sec];
	}
	level.sec = sec;
	level.sec_index = std::move(index);
	detail::recenter(level);
	return level;
}

// Damping factor: clipped lag-1 autocorrelation of the innovation differences.
struct DampedTrend {
	double phi = 0.0;
};

namespace constants {
inline constexpr double kPhiEpsilon = 1e-3;
}

inline DampedTrend damped_trend(const LevelSeries& level) {
	const int n = level.n_cycles();
	if (n < 4) {
		return DampedTrend{0.0};  // fewer than 3 differences
	}
	Eigen::VectorXd d(n - 1);
	for (int i = 1; i < n; ++i) {
		d[i - 1] = level.innovations[i] - level.innovations[i - 1];
	}
	const double mean = d.mean();
	double denom = 0.0;
	double numer = 0.0;
	for (int i = 0; i < d.size(); ++i) {
		denom += (d[i] - mean) * (d[i] - mean);
		if (i + 1 < d.size()) {
			numer += (d[i] - mean) * (d[i + 1] - mean);
		}
	}
	double rho;
	if (denom <= 1e-20 * (mean * mean * d.size() + 1e-300)) {
		// Degenerate: constant increments are perfectly persistent.
		rho = (mean != 0.0) ? 1.0 : 0.0;
	} else {
		rho = numer / denom;
	}
	return DampedTrend{std::min(std::max(rho, 0.0), 1.0 - constants::kPhiEpsilon)};
}

// Deviation-form Ridge on the differenced innovations, Eq.-6 sign convention:
// target dZ_i, features (1, i/n_c, -Z_{i-1} [, +Z_{i-sec}]).
struct RidgeFit {
	std::shared_ptr<RidgeGcvFit> core;
	int p = 3;
	int sec = 0;
	int n_train = 0;
	double leverage_test = 0.0;   // at the one-step-ahead feature point
	Eigen::VectorXd coefficients; // averaged deviation coefficients, raw space
	std::vector<double> loo_residuals;
};

namespace detail {

inline Eigen::VectorXd level_feature_row(const LevelSeries& level,
                                         const std::vector<double>& z_history,
                                         int cycle_index_1based, int p, int sec) {
	Eigen::VectorXd x(p);
	x[0] = 1.0;
	x[1] = static_cast<double>(cycle_index_1based) / level.n_cycles();
	x[2] = -z_history[cycle_index_1based - 2];  // Z_{i-1}
	if (sec > 0) {
		x[3] = z_history[cycle_index_1based - 1 - sec];  // Z_{i-sec}
	}
	return x;
}

// Feature at the one-step-ahead point; Z_{n_c} = 0 by the NLinear anchor.
inline Eigen::VectorXd level_feature_row_onestep(const LevelSeries& level, int p, int sec) {
	const int n_c = level.n_cycles();
	std::vector<double> z(level.innovations.data(), level.innovations.data() + n_c);
	z.push_back(0.0);
	return level_feature_row(level, z, n_c + 1, p, sec);
}

}  // namespace detail

inline RidgeFit ridge_fit(const LevelSeries& level, int n_alphas = constants::kNAlphas,
                          GcvTemperature temperature = GcvTemperature::GcvMin) {
	const int n_c = level.n_cycles();
	const int sec = level.sec;
	const int p = (sec > 0) ? 4 : 3;
	const int first = std::max(2, sec + 1);  // first 1-based target index
	const int rows = n_c - first + 1;
	if (rows < 1) {
		throw std::invalid_argument("ridge_fit: no usable regression rows");
	}

	std::vector<double> z(level.innovations.data(), level.innovations.data() + n_c);
	Eigen::MatrixXd x(rows, p);
	Eigen::VectorXd y(rows);
	for (int i = first; i <= n_c; ++i) {
		x.row(i - first) = detail::level_feature_row(level, z, i, p, sec);
		y[i - first] = z[i - 1] - z[i - 2];
	}

	RidgeFit fit;
	fit.core = std::make_shared<RidgeGcvFit>(x, y, n_alphas, temperature);
	fit.p = p;
	fit.sec = sec;
	fit.n_train = rows;
	fit.coefficients = fit.core->coef_raw();
	fit.loo_residuals = fit.core->loo_residuals();

	fit.leverage_test = fit.core->leverage(detail::level_feature_row_onestep(level, p, sec));
	return fit;
}

// Multi-step Level forecast on the raw scale. The recursion runs on the
// innovations: each step's predicted increment (from features built on the
// path's own prior values) is damped by phi^(h-1); `step_noise`, when
// provided, is added after damping so sampled-path uncertainty compounds.
inline std::vector<double> forecast_levels(
    const RidgeFit& fit, const LevelSeries& level, int n_steps, DampedTrend damping,
    const std::function<double(int)>& step_noise = {}) {
	const int n_c = level.n_cycles();
	const int sec = fit.sec;
	std::vector<double> z(level.innovations.data(), level.innovations.data() + n_c);
	z.reserve(n_c + n_steps);

	std::vector<double> out;
	out.reserve(n_steps);
	double damp = 1.0;
	for (int h = 1; h <= n_steps; ++h) {
		const Eigen::VectorXd x = detail::level_feature_row(level, z, n_c + h, fit.p, sec);
		double increment = fit.core->predict(x) * damp;
		if (step_noise) {
			increment += step_noise(h);
		}
		const double z_next = z.back() + increment;
		z.push_back(z_next);
		damp *= damping.phi;

		double transformed = z_next + level.transformed[n_c - 1];
		if (sec > 0) {
			transformed *= level.sec_index[(n_c + h - 1) % sec];
		}
		out.push_back(box_cox_inverse(transformed, level.lambda, level.exp_clip));
	}
	return out;
}

}  // namespace flair
