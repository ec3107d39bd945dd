#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>
#include <string>

#include "flair/series.hpp"

namespace flair {

class InsufficientData : public std::runtime_error {
public:
	explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

namespace constants {
// Cap on the number of complete cycles retained (memory / speed guard).
inline constexpr int kMaxCompleteCycles = 500;
}  // namespace constants

// P x n_c reshape of a shifted series. Column i is cycle i in chronological
// order, row j is phase j; the last column is the most recent complete cycle
// (the incomplete remainder is dropped from the front).
struct CycleMatrix {
	Eigen::MatrixXd entries;         // P x n_c
	int period = 0;                  // P
	int n_cycles = 0;                // n_c
	Eigen::VectorXd singular_values; // non-increasing
};

inline Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& m) {
	// Dense thin SVD; P <= a few hundred and n_c <= 500, so this is cheap.
	Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
	return svd.singularValues();
}

inline CycleMatrix reshape(const ShiftedSeries& series, int period,
                           int max_cycles = constants::kMaxCompleteCycles) {
	if (period < 1) {
		throw std::invalid_argument("reshape: period must be >= 1");
	}
	const std::size_t n = series.values.size();
	if (n < static_cast<std::size_t>(period)) {
		throw InsufficientData("reshape: series shorter than one period (n=" +
		                       std::to_string(n) + ", P=" + std::to_string(period) + ")");
	}
	int n_cycles = static_cast<int>(n / static_cast<std::size_t>(period));
	n_cycles = std::min(n_cycles, max_cycles);
	const std::size_t used = static_cast<std::size_t>(n_cycles) * static_cast<std::size_t>(period);
	const std::size_t start = n - used;

	CycleMatrix out;
	out.period = period;
	out.n_cycles = n_cycles;
	out.entries.resize(period, n_cycles);
	for (int c = 0; c < n_cycles; ++c) {
		for (int j = 0; j < period; ++j) {
			out.entries(j, c) = series.values[start + static_cast<std::size_t>(c) * period + j];
		}
	}
	out.singular_values = singular_values_of(out.entries);
	return out;
}

}  // namespace flair
