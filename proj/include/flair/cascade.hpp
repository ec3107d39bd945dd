#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flair/level.hpp"
#include "flair/period.hpp"
#include "flair/rank1.hpp"
#include "flair/rng.hpp"
#include "flair/series.hpp"
#include "flair/shape.hpp"

namespace flair {

// Internal constants (global; never varied per series outside experiments).
struct CascadeConstants {
	int shape_k = 2;
	int phase_noise_k = 50;
	int min_complete = 3;
	int max_complete = 500;
	int min_positive_bc = 10;
	double bc_exp_clip = 30.0;
	int n_alphas = 25;
};

struct CascadeConfig {
	int n_samples = 200;
	std::uint64_t seed = 0;
	CascadeConstants constants;
	GcvTemperature gcv_temperature = GcvTemperature::GcvMin;

	// Harness hooks; the forecaster defaults are canonical.
	std::optional<double> pin_alpha;       // force all GCV weight onto one grid point
	std::optional<int> period_override;    // bypass BIC period selection
	ShapeVariant shape_variant = ShapeVariant::FrozenK2;
	std::optional<int> shape_k_override;   // K for the frozen shape; 0 means n_c
};

enum class Branch { Rank1, PlainRidge, LastValueGaussian };

inline std::string_view branch_name(Branch b) {
	switch (b) {
		case Branch::Rank1: return "rank1";
		case Branch::PlainRidge: return "plain_ridge";
		case Branch::LastValueGaussian: return "last_value_gaussian";
	}
	return "rank1";
}

struct ForecastResult {
	std::vector<double> point;      // length H
	Eigen::MatrixXd samples;        // n_samples x H
	Branch branch = Branch::Rank1;
	std::map<std::string, double> diagnostics;
};

// Whole residual columns from the trailing window of E = M - L S', drawn
// per forecast cycle so phase noise is scenario-coherent within a cycle.
struct PhaseNoiseModel {
	Eigen::MatrixXd residual_columns;  // P x min(phase_noise_k, n_c)
	double deflation = 1.0;            // 1 / sqrt(1 + h_test)
};

struct LevelNoiseModel {
	enum class Mode { BootstrapLoo, StudentT };
	Mode mode = Mode::BootstrapLoo;
	std::vector<double> loo_residuals;
	int t_dof = 2;
	double t_scale = 0.0;

	static LevelNoiseModel from_loo(const std::vector<double>& loo) {
		LevelNoiseModel out;
		out.loo_residuals = loo;
		const int n_loo = static_cast<int>(loo.size());
		if (n_loo >= 4) {
			out.mode = Mode::BootstrapLoo;
			return out;
		}
		out.mode = Mode::StudentT;
		out.t_dof = std::max(n_loo - 1, 2);
		if (n_loo >= 2) {
			double mean = 0.0;
			for (double e : loo) mean += e;
			mean /= n_loo;
			double ss = 0.0;
			for (double e : loo) ss += (e - mean) * (e - mean);
			out.t_scale = std::sqrt(ss / (n_loo - 1));
		} else if (n_loo == 1) {
			out.t_scale = std::abs(loo[0]);
		}
		return out;
	}

	double draw(Rng& rng) const {
		if (mode == Mode::BootstrapLoo) {
			return loo_residuals[rng.index(loo_residuals.size())];
		}
		// Student-t via normal / sqrt(chi2/dof), chi2 from summed squared normals.
		double chi2 = 0.0;
		for (int i = 0; i < t_dof; ++i) {
			const double g = rng.normal();
			chi2 += g * g;
		}
		chi2 = std::max(chi2, 1e-12);
		return t_scale * rng.normal() / std::sqrt(chi2 / t_dof);
	}
};

namespace detail {

inline void snap_integers(ForecastResult& result) {
	for (double& v : result.point) v = std::round(v);
	for (int i = 0; i < result.samples.rows(); ++i) {
		for (int j = 0; j < result.samples.cols(); ++j) {
			result.samples(i, j) = std::round(result.samples(i, j));
		}
	}
}

// Branch 3: last value with Gaussian noise scaled to the recent differences.
inline ForecastResult last_value_gaussian(const TimeSeries& series, int horizon,
                                          const CascadeConfig& config, Rng& rng) {
	const auto& y = series.values();
	const int n = static_cast<int>(y.size());
	const double last = y[n - 1];
	const int k = std::min(config.constants.shape_k, n - 1);
	double scale = 0.0;
	if (k > 0) {
		double ss = 0.0;
		for (int i = 0; i < k; ++i) {
			const double d = y[n - 1 - i] - y[n - 2 - i];
			ss += d * d;
		}
		scale = std::sqrt(ss / k);
	}
	ForecastResult out;
	out.branch = Branch::LastValueGaussian;
	out.point.assign(horizon, last);
	out.samples.resize(config.n_samples, horizon);
	for (int s = 0; s < config.n_samples; ++s) {
		for (int h = 0; h < horizon; ++h) {
			out.samples(s, h) = last + scale * rng.normal();
		}
	}
	out.diagnostics["P_star"] = 1.0;
	out.diagnostics["n_c"] = n;
	out.diagnostics["shift"] = 0.0;
	if (series.is_integer_valued()) snap_integers(out);
	return out;
}

struct LevelPipeline {
	LevelSeries level;
	RidgeFit fit;
	DampedTrend damping;
};

inline LevelPipeline fit_level_pipeline(const Eigen::VectorXd& raw_levels,
                                        const PeriodCandidates& candidates, int p_star,
                                        const CascadeConfig& config) {
	LevelPipeline out;
	out.level = build_level(raw_levels, config.constants.min_positive_bc,
	                        config.constants.bc_exp_clip);
	LevelSeries divided = secondary_divide(out.level, candidates, p_star);
	// Keep the secondary lag only when it leaves enough rows for a stable fit.
	if (divided.sec == 0 || divided.n_cycles() - divided.sec >= 8) {
		out.level = std::move(divided);
	}
	out.fit = ridge_fit(out.level, config.constants.n_alphas, config.gcv_temperature);
	out.damping = damped_trend(out.level);
	return out;
}

// Rebuild the deviation design exactly as ridge_fit does and concentrate all
// GCV weight on one grid point (experiment hook).
inline void repin_fit(LevelPipeline& pipeline, double alpha) {
	const LevelSeries& lvl = pipeline.level;
	const int sec_used = lvl.sec;
	const int pf = (sec_used > 0) ? 4 : 3;
	const int first = std::max(2, sec_used + 1);
	const int rows = lvl.n_cycles() - first + 1;
	Eigen::MatrixXd x(rows, pf);
	Eigen::VectorXd yv(rows);
	std::vector<double> z(lvl.innovations.data(), lvl.innovations.data() + lvl.n_cycles());
	for (int i = first; i <= lvl.n_cycles(); ++i) {
		x.row(i - first) = level_feature_row(lvl, z, i, pf, sec_used);
		yv[i - first] = z[i - 1] - z[i - 2];
	}
	pipeline.fit.core->pin_weight_on_alpha(alpha, x, yv);
	pipeline.fit.coefficients = pipeline.fit.core->coef_raw();
	pipeline.fit.loo_residuals = pipeline.fit.core->loo_residuals();
	pipeline.fit.leverage_test = pipeline.fit.core->leverage(
	    level_feature_row_onestep(lvl, pf, sec_used));
}

}  // namespace detail

// The three-branch forecaster. Every branch trigger is a function of the
// training window alone; the RNG is an explicit per-call value.
inline ForecastResult forecast(const TimeSeries& series, Horizon horizon,
                               const CascadeConfig& config = {}) {
	const int h_steps = horizon.steps;
	Rng rng(config.seed);
	const int n = static_cast<int>(series.size());

	if (n < 3) {
		return detail::last_value_gaussian(series, h_steps, config, rng);
	}

	const ShiftedSeries shifted = positivity_shift(series);
	const PeriodCandidates candidates = candidates_for(series.freq());

	int p_star = 1;
	PeriodGuard guard = PeriodGuard::None;
	if (config.period_override) {
		p_star = *config.period_override;
	} else {
		PeriodChoice choice = select_period(shifted, candidates, 3, config.constants.min_complete,
		                                    config.constants.max_complete);
		p_star = choice.p_star;
		guard = choice.guard_fired;
	}

	// Branch 1 eligibility re-checked on the winner.
	bool rank1_ok = false;
	CycleMatrix m;
	std::optional<int> sec;
	if (p_star >= 2 && n >= p_star) {
		m = reshape(shifted, p_star, config.constants.max_complete);
		sec = secondary_lag(candidates, p_star, m.n_cycles);
		const int p_features = sec ? 4 : 3;
		rank1_ok =
		    m.n_cycles >= config.constants.min_complete && m.n_cycles >= 2 * p_features;
	}

	ForecastResult out;
	out.diagnostics["shift"] = shifted.shift;

	if (rank1_ok) {
		out.branch = Branch::Rank1;
		const int p = p_star;
		const int n_c = m.n_cycles;

		ShapeVector shape;
		if (config.shape_k_override) {
			const int k = (*config.shape_k_override == 0) ? n_c : *config.shape_k_override;
			shape = frozen_shape(m, k);
		} else if (config.shape_variant != ShapeVariant::FrozenK2) {
			shape = variant_shape(m, config.shape_variant);
		} else {
			shape = frozen_shape(m, config.constants.shape_k);
		}

		const Eigen::VectorXd levels = m.entries.colwise().sum().transpose();
		auto pipeline = detail::fit_level_pipeline(levels, candidates, p, config);
		if (config.pin_alpha) {
			detail::repin_fit(pipeline, *config.pin_alpha);
		}

		const int n_level_steps = (h_steps + p - 1) / p;
		const std::vector<double> level_path =
		    forecast_levels(pipeline.fit, pipeline.level, n_level_steps, pipeline.damping);

		out.point.resize(h_steps);
		for (int h = 1; h <= h_steps; ++h) {
			const int cycle = (h - 1) / p;
			const int phase = (h - 1) % p;
			out.point[h - 1] = level_path[cycle] * shape.weights[phase] - shifted.shift;
		}

		// Predictive samples: Level bootstrap through the recursion plus
		// scenario-coherent phase noise from whole residual columns.
		const Eigen::MatrixXd residual =
		    m.entries - shape.weights * levels.transpose();
		PhaseNoiseModel phase_noise;
		const int window = std::min(config.constants.phase_noise_k, n_c);
		phase_noise.residual_columns = residual.rightCols(window);
		phase_noise.deflation = 1.0 / std::sqrt(1.0 + pipeline.fit.leverage_test);
		const LevelNoiseModel level_noise = LevelNoiseModel::from_loo(pipeline.fit.loo_residuals);

		out.samples.resize(config.n_samples, h_steps);
		std::vector<double> noise(n_level_steps);
		for (int s = 0; s < config.n_samples; ++s) {
			for (int c = 0; c < n_level_steps; ++c) noise[c] = level_noise.draw(rng);
			const std::vector<double> sampled_levels = forecast_levels(
			    pipeline.fit, pipeline.level, n_level_steps, pipeline.damping,
			    [&noise](int h) { return noise[h - 1]; });
			for (int c = 0; c < n_level_steps; ++c) {
				const int col = static_cast<int>(rng.index(window));
				const int h_lo = c * p + 1;
				const int h_hi = std::min((c + 1) * p, h_steps);
				for (int h = h_lo; h <= h_hi; ++h) {
					const int phase = (h - 1) % p;
					out.samples(s, h - 1) =
					    sampled_levels[c] * shape.weights[phase] +
					    phase_noise.deflation * phase_noise.residual_columns(phase, col) -
					    shifted.shift;
				}
			}
		}

		const Rank1Energy energy = rank1_energy(m);
		out.diagnostics["P_star"] = p;
		out.diagnostics["n_c"] = n_c;
		out.diagnostics["r1_shifted"] = energy.r1_shifted;
		out.diagnostics["r1_centered"] = energy.r1_centered;
		out.diagnostics["lambda"] = pipeline.level.lambda;
		out.diagnostics["phi"] = pipeline.damping.phi;
		out.diagnostics["gcv_min"] = pipeline.fit.core->gcv_min();
		out.diagnostics["h_test"] = pipeline.fit.leverage_test;
		out.diagnostics["sec"] = pipeline.level.sec;
		out.diagnostics["level_noise_mode"] =
		    (level_noise.mode == LevelNoiseModel::Mode::BootstrapLoo) ? 0.0 : 1.0;
	} else {
		// Branch 2: plain Ridge on the raw (shifted) series, P = 1.
		out.branch = Branch::PlainRidge;
		const int used = std::min(n, config.constants.max_complete);
		Eigen::VectorXd levels(used);
		for (int i = 0; i < used; ++i) {
			levels[i] = shifted.values[n - used + i];
		}
		auto pipeline = detail::fit_level_pipeline(levels, candidates, 1, config);
		const std::vector<double> level_path =
		    forecast_levels(pipeline.fit, pipeline.level, h_steps, pipeline.damping);

		out.point.resize(h_steps);
		for (int h = 0; h < h_steps; ++h) {
			out.point[h] = level_path[h] - shifted.shift;
		}

		const LevelNoiseModel level_noise = LevelNoiseModel::from_loo(pipeline.fit.loo_residuals);
		out.samples.resize(config.n_samples, h_steps);
		std::vector<double> noise(h_steps);
		for (int s = 0; s < config.n_samples; ++s) {
			for (int h = 0; h < h_steps; ++h) noise[h] = level_noise.draw(rng);
			const std::vector<double> sampled_levels = forecast_levels(
			    pipeline.fit, pipeline.level, h_steps, pipeline.damping,
			    [&noise](int h) { return noise[h - 1]; });
			for (int h = 0; h < h_steps; ++h) {
				out.samples(s, h) = sampled_levels[h] - shifted.shift;
			}
		}

		out.diagnostics["P_star"] = 1.0;
		out.diagnostics["n_c"] = used;
		out.diagnostics["lambda"] = pipeline.level.lambda;
		out.diagnostics["phi"] = pipeline.damping.phi;
		out.diagnostics["gcv_min"] = pipeline.fit.core->gcv_min();
		out.diagnostics["h_test"] = pipeline.fit.leverage_test;
		out.diagnostics["sec"] = pipeline.level.sec;
		out.diagnostics["guard"] = static_cast<double>(guard == PeriodGuard::DofGuard ? 2
		                                               : guard == PeriodGuard::TooFewCycles ? 1
		                                               : 0);
		out.diagnostics["level_noise_mode"] =
		    (level_noise.mode == LevelNoiseModel::Mode::BootstrapLoo) ? 0.0 : 1.0;
	}

	if (series.is_integer_valued()) {
		detail::snap_integers(out);
	}
	return out;
}

// Empirical per-step quantiles by linear interpolation of order statistics.
// Returns a levels.size() x H matrix.
inline Eigen::MatrixXd quantiles(const ForecastResult& result, std::span<const double> levels) {
	if (result.samples.rows() == 0) {
		throw std::invalid_argument("quantiles: no samples");
	}
	for (double q : levels) {
		if (!(q > 0.0 && q < 1.0)) {
			throw std::invalid_argument("quantiles: levels must lie in (0, 1)");
		}
	}
	const int s = static_cast<int>(result.samples.rows());
	const int h = static_cast<int>(result.samples.cols());
	Eigen::MatrixXd out(static_cast<Eigen::Index>(levels.size()), h);
	std::vector<double> column(s);
	for (int j = 0; j < h; ++j) {
		for (int i = 0; i < s; ++i) column[i] = result.samples(i, j);
		std::sort(column.begin(), column.end());
		for (std::size_t q = 0; q < levels.size(); ++q) {
			const double pos = levels[q] * (s - 1);
			const int lo = static_cast<int>(std::floor(pos));
			const int hi = std::min(lo + 1, s - 1);
			const double frac = pos - lo;
			out(static_cast<Eigen::Index>(q), j) = column[lo] + frac * (column[hi] - column[lo]);
		}
	}
	return out;
}

}  // namespace flair
