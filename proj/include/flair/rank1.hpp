#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "flair/reshape.hpp"
#include "flair/shape.hpp"

namespace flair {

// Energy statistics of the cycle matrix: r1 = sigma_1^2 / sum sigma_i^2 on
// the shifted-positive matrix and on the row-centered matrix, plus the
// rank-1 residual E = M - L S' used for phase-noise sampling.
struct Rank1Energy {
	double r1_shifted = 0.0;
	double r1_centered = 0.0;
	Eigen::MatrixXd residual;  // P x n_c
};

namespace detail {

inline double r1_of_spectrum(const Eigen::VectorXd& sv) {
	const double total = sv.squaredNorm();
	if (total <= 0.0) return 0.0;
	return sv[0] * sv[0] / total;
}

}  // namespace detail

inline Rank1Energy rank1_energy(const CycleMatrix& m) {
	Rank1Energy out;
	out.r1_shifted = detail::r1_of_spectrum(m.singular_values);

	// Row-centering removes both the constant offset and the seasonal profile.
	Eigen::MatrixXd centered = m.entries;
	centered.colwise() -= m.entries.rowwise().mean();
	const double centered_energy = centered.squaredNorm();
	if (centered_energy <= 1e-24 * m.entries.squaredNorm()) {
		out.r1_centered = 0.0;  // all-constant matrix: no periodic signal
	} else {
		out.r1_centered = detail::r1_of_spectrum(singular_values_of(centered));
	}

	const Eigen::VectorXd level = m.entries.colwise().sum().transpose();
	const ShapeVector shape = frozen_shape(m, constants::kShapeK);
	out.residual = m.entries - shape.weights * level.transpose();
	return out;
}

// Proposition-style bound 2 C_A P / min|A| on the relative Frobenius residual
// of the best rank-1 fit of A(t) * s(t mod P). Outside the slow-variation
// regime (2 C_A P > min|A|) the bound is vacuous.
struct Prop1Bound {
	bool vacuous = false;
	double value = 0.0;
};

inline Prop1Bound prop1_bound(double amplitude_lipschitz, double min_amplitude, int period) {
	if (!(min_amplitude > 0.0)) {
		throw std::invalid_argument("prop1_bound: min_amplitude must be > 0");
	}
	if (period < 1) {
		throw std::invalid_argument("prop1_bound: period must be >= 1");
	}
	Prop1Bound out;
	const double numerator = 2.0 * amplitude_lipschitz * period;
	if (numerator > min_amplitude) {
		out.vacuous = true;
		return out;
	}
	out.value = numerator / min_amplitude;
	return out;
}

}  // namespace flair
