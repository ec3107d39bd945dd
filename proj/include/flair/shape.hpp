#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "flair/reshape.hpp"

namespace flair {

namespace constants {
// Positivity clamp applied before renormalising any shape onto the simplex.
inline constexpr double kShapePositivityFloor = 1e-9;
// Frozen-shape window.
inline constexpr int kShapeK = 2;
}  // namespace constants

// A point on the P-simplex: the within-cycle profile S.
struct ShapeVector {
	Eigen::VectorXd weights;  // length P, sums to 1, entries > 0
	int k_used = 0;
};

enum class ShapeVariant {
	FrozenK2,
	Ewma,          // exponential decay rho = 0.7 over proportion columns
	FourierJ1,     // first-harmonic projection of the pooled profile
	SavitzkyGolay, // quadratic smoothing of the pooled profile, circular
	JsUniform,     // James-Stein shrink toward the uniform profile
	JsHarmonic,    // James-Stein shrink toward the FourierJ1 profile
	PooledMle,     // proportions of row sums over all cycles
	Rank2Svd,      // frozen shape of the rank-2 truncation
	Rank3Svd,      // frozen shape of the rank-3 truncation
};

inline std::string_view shape_variant_name(ShapeVariant v) {
	switch (v) {
		case ShapeVariant::FrozenK2: return "frozen_k2";
		case ShapeVariant::Ewma: return "ewma";
		case ShapeVariant::FourierJ1: return "fourier1";
		case ShapeVariant::SavitzkyGolay: return "savgol";
		case ShapeVariant::JsUniform: return "js_uniform";
		case ShapeVariant::JsHarmonic: return "js_harmonic";
		case ShapeVariant::PooledMle: return "pooled_mle";
		case ShapeVariant::Rank2Svd: return "rank2";
		case ShapeVariant::Rank3Svd: return "rank3";
	}
	return "frozen_k2";
}

inline std::optional<ShapeVariant> parse_shape_variant(std::string_view name) {
	if (name == "frozen_k2" || name == "frozen") return ShapeVariant::FrozenK2;
	if (name == "ewma") return ShapeVariant::Ewma;
	if (name == "fourier1") return ShapeVariant::FourierJ1;
	if (name == "savgol") return ShapeVariant::SavitzkyGolay;
	if (name == "js_uniform") return ShapeVariant::JsUniform;
	if (name == "js_harmonic") return ShapeVariant::JsHarmonic;
	if (name == "pooled_mle") return ShapeVariant::PooledMle;
	if (name == "rank2") return ShapeVariant::Rank2Svd;
	if (name == "rank3") return ShapeVariant::Rank3Svd;
	return std::nullopt;
}

namespace detail {

// Clamp to the positivity floor and renormalise onto the simplex.
inline Eigen::VectorXd to_simplex(Eigen::VectorXd raw) {
	for (int j = 0; j < raw.size(); ++j) {
		if (!(raw[j] > constants::kShapePositivityFloor)) {
			raw[j] = constants::kShapePositivityFloor;
		}
	}
	return raw / raw.sum();
}

// Per-cycle proportion columns M_{j,k} / L_k.
inline Eigen::MatrixXd proportion_columns(const Eigen::MatrixXd& m) {
	Eigen::MatrixXd props = m;
	for (int k = 0; k < m.cols(); ++k) {
		const double col_sum = m.col(k).sum();
		if (col_sum <= 0.0) {
			throw std::invalid_argument("shape: non-positive column sum (series not shifted?)");
		}
		props.col(k) /= col_sum;
	}
	return props;
}

// Mean of the proportion columns over all cycles.
inline Eigen::VectorXd pooled_profile(const Eigen::MatrixXd& m) {
	const Eigen::MatrixXd props = proportion_columns(m);
	return props.rowwise().mean();
}

inline Eigen::VectorXd fourier_j1_profile(const Eigen::VectorXd& profile) {
	const int p = static_cast<int>(profile.size());
	const double two_pi = 6.283185307179586476925287;
	double a0 = profile.mean();
	double a1 = 0.0;
	double b1 = 0.0;
	for (int j = 0; j < p; ++j) {
		const double ang = two_pi * j / p;
		a1 += profile[j] * std::cos(ang);
		b1 += profile[j] * std::sin(ang);
	}
	a1 *= 2.0 / p;
	b1 *= 2.0 / p;
	Eigen::VectorXd out(p);
	for (int j = 0; j < p; ++j) {
		const double ang = two_pi * j / p;
		out[j] = a0 + a1 * std::cos(ang) + b1 * std::sin(ang);
	}
	return out;
}

// Quadratic Savitzky-Golay smoothing weights for an odd window.
inline Eigen::VectorXd savgol_weights(int window) {
	const int half = (window - 1) / 2;
	Eigen::MatrixXd v(window, 3);
	for (int i = -half; i <= half; ++i) {
		v(i + half, 0) = 1.0;
		v(i + half, 1) = i;
		v(i + half, 2) = static_cast<double>(i) * i;
	}
	// Smoothed centre value = e0' (V'V)^-1 V' y.
	const Eigen::MatrixXd vtv = v.transpose() * v;
	const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(3, 0);
	return v * vtv.ldlt().solve(e0);
}

inline Eigen::VectorXd savgol_circular(const Eigen::VectorXd& profile, int window) {
	const int p = static_cast<int>(profile.size());
	if (window < 5 || window > p) {
		return profile;  // quadratic fit on w<=3 points interpolates; nothing to smooth
	}
	const int half = (window - 1) / 2;
	const Eigen::VectorXd w = savgol_weights(window);
	Eigen::VectorXd out(p);
	for (int j = 0; j < p; ++j) {
		double acc = 0.0;
		for (int i = -half; i <= half; ++i) {
			acc += w[i + half] * profile[((j + i) % p + p) % p];
		}
		out[j] = acc;
	}
	return out;
}

// Positive-part James-Stein shrink of the pooled profile toward a target.
inline Eigen::VectorXd js_shrink(const Eigen::MatrixXd& m, const Eigen::VectorXd& target) {
	const int p = static_cast<int>(m.rows());
	const int n_c = static_cast<int>(m.cols());
	const Eigen::MatrixXd props = proportion_columns(m);
	const Eigen::VectorXd pooled = props.rowwise().mean();
	// Plug-in noise estimate: mean per-phase variance of the proportions
	// across cycles, divided by n_c (variance of the pooled mean).
	double v_hat = 0.0;
	if (n_c >= 2) {
		for (int j = 0; j < p; ++j) {
			const double mu = pooled[j];
			double ss = 0.0;
			for (int k = 0; k < n_c; ++k) {
				const double d = props(j, k) - mu;
				ss += d * d;
			}
			v_hat += ss / (n_c - 1);
		}
		v_hat /= p;
		v_hat /= n_c;
	}
	const double dist2 = (pooled - target).squaredNorm();
	double factor = 1.0;
	if (dist2 > 0.0 && p > 3) {
		factor = std::max(0.0, 1.0 - (p - 3) * v_hat / dist2);
	}
	return target + factor * (pooled - target);
}

}  // namespace detail

// Frozen shape of Eq-style within-period proportions: average of the K most
// recent proportion columns, renormalised. K is clipped to n_c.
inline ShapeVector frozen_shape(const CycleMatrix& m, int k = constants::kShapeK) {
	if (k < 1) {
		throw std::invalid_argument("frozen_shape: K must be >= 1");
	}
	const int n_c = m.n_cycles;
	const int k_used = std::min(k, n_c);
	Eigen::VectorXd acc = Eigen::VectorXd::Zero(m.period);
	for (int back = 0; back < k_used; ++back) {
		const int col = n_c - 1 - back;
		const double col_sum = m.entries.col(col).sum();
		if (col_sum <= 0.0) {
			throw std::invalid_argument("frozen_shape: non-positive column sum");
		}
		acc += m.entries.col(col) / col_sum;
	}
	acc /= static_cast<double>(k_used);
	ShapeVector out;
	out.weights = detail::to_simplex(std::move(acc));
	out.k_used = k_used;
	return out;
}

inline ShapeVector variant_shape(const CycleMatrix& m, ShapeVariant kind) {
	const int p = m.period;
	const int n_c = m.n_cycles;
	ShapeVector out;
	out.k_used = n_c;

	switch (kind) {
		case ShapeVariant::FrozenK2:
			return frozen_shape(m, constants::kShapeK);
		case ShapeVariant::Ewma: {
			constexpr double kRho = 0.7;
			const Eigen::MatrixXd props = detail::proportion_columns(m.entries);
			Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
			double wsum = 0.0;
			for (int k = 0; k < n_c; ++k) {
				const double w = std::pow(kRho, n_c - 1 - k);  // most recent column has weight 1
				acc += w * props.col(k);
				wsum += w;
			}
			out.weights = detail::to_simplex(acc / wsum);
			return out;
		}
		case ShapeVariant::FourierJ1: {
			const Eigen::VectorXd pooled = detail::pooled_profile(m.entries);
			out.weights = detail::to_simplex(detail::fourier_j1_profile(pooled));
			return out;
		}
		case ShapeVariant::SavitzkyGolay: {
			const Eigen::VectorXd pooled = detail::pooled_profile(m.entries);
			int window = std::min(7, p);
			if (window % 2 == 0) window -= 1;
			out.weights = detail::to_simplex(detail::savgol_circular(pooled, window));
			return out;
		}
		case ShapeVariant::JsUniform: {
			const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(p, 1.0 / p);
			out.weights = detail::to_simplex(detail::js_shrink(m.entries, uniform));
			return out;
		}
		case ShapeVariant::JsHarmonic: {
			const Eigen::VectorXd pooled = detail::pooled_profile(m.entries);
			const Eigen::VectorXd target = detail::fourier_j1_profile(pooled);
			out.weights = detail::to_simplex(detail::js_shrink(m.entries, target));
			return out;
		}
		case ShapeVariant::PooledMle: {
			const Eigen::VectorXd row_sums = m.entries.rowwise().sum();
			out.weights = detail::to_simplex(row_sums / row_sums.sum());
			return out;
		}
		case ShapeVariant::Rank2Svd:
		case ShapeVariant::Rank3Svd: {
			const int rank = (kind == ShapeVariant::Rank2Svd) ? 2 : 3;
			if (n_c < rank) {
				return frozen_shape(m, constants::kShapeK);
			}
			Eigen::BDCSVD<Eigen::MatrixXd> svd(m.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
			const Eigen::VectorXd& sv = svd.singularValues();
			if (sv.size() < 2 || sv[1] <= 1e-12 * sv[0]) {
				return frozen_shape(m, constants::kShapeK);  // degenerate second component
			}
			const int r = std::min<int>(rank, static_cast<int>(sv.size()));
			Eigen::MatrixXd truncated = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal() *
			                            svd.matrixV().leftCols(r).transpose();
			truncated = truncated.cwiseMax(constants::kShapePositivityFloor);
			CycleMatrix m_r;
			m_r.entries = truncated;
			m_r.period = p;
			m_r.n_cycles = n_c;
			ShapeVector s = frozen_shape(m_r, constants::kShapeK);
			s.k_used = n_c;
			return s;
		}
	}
	throw std::logic_error("variant_shape: unhandled variant");
}

}  // namespace flair
