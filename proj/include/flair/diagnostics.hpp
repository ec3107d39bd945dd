#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flair/period.hpp"
#include "flair/rank1.hpp"
#include "flair/series.hpp"

namespace flair {

enum class Route { Flair, SeasonalNaive, StlOrEts, CrostonLike, PlainRidgeOrFoundation };

inline std::string_view route_name(Route r) {
	switch (r) {
		case Route::Flair: return "flair";
		case Route::SeasonalNaive: return "seasonal_naive";
		case Route::StlOrEts: return "stl_or_ets";
		case Route::CrostonLike: return "croston_like";
		case Route::PlainRidgeOrFoundation: return "plain_ridge_or_foundation";
	}
	return "flair";
}

// Second-spike subcriticality on the spiked-rectangular surrogate: shape
// refinement is hopeless when (1 - r1) min(P, n_c) <= sqrt(P / n_c).
struct BbpCheck {
	double lhs = 0.0;
	double rhs = 0.0;
	bool subcritical = false;
};

inline BbpCheck bbp_second_spike_detail(double r1_centered, int period, int n_cycles) {
	if (period < 2 || n_cycles < 2) {
		throw std::invalid_argument("bbp_second_spike: need P >= 2 and n_c >= 2");
	}
	BbpCheck out;
	out.lhs = (1.0 - r1_centered) * std::min(period, n_cycles);
	out.rhs = std::sqrt(static_cast<double>(period) / n_cycles);
	out.subcritical = out.lhs <= out.rhs;
	return out;
}

inline bool bbp_second_spike(double r1_centered, int period, int n_cycles) {
	return bbp_second_spike_detail(r1_centered, period, n_cycles).subcritical;
}

struct Diagnosis {
	double r1_centered = std::numeric_limits<double>::quiet_NaN();
	int n_c = 0;
	int p_star = 1;
	double zero_fraction = 0.0;
	bool bbp_second_spike_subcritical = false;
	Route route = Route::Flair;
	std::vector<std::string> reasons;
	bool headline_regime = false;  // r1 >= 0.77 and n_c >= 10
};

// Training-window-only routing: the four-step rule plus the zero-heavy
// Croston regime, with the headline (r1, n_c) threshold reported alongside.
inline Diagnosis diagnose(const TimeSeries& series) {
	Diagnosis out;
	const auto& y = series.values();
	int zeros = 0;
	for (double v : y) {
		if (v == 0.0) ++zeros;
	}
	out.zero_fraction = static_cast<double>(zeros) / static_cast<double>(y.size());

	const ShiftedSeries shifted = positivity_shift(series);
	const PeriodCandidates candidates = candidates_for(series.freq());
	const PeriodChoice choice = select_period(shifted, candidates);
	// Routing follows the MDL choice itself; the forecaster's DoF fallback is
	// a separate concern handled by the cascade.
	out.p_star = choice.p_star_bic;

	if (out.p_star == 1) {
		out.n_c = static_cast<int>(y.size());
		out.route = Route::PlainRidgeOrFoundation;
		out.reasons.push_back("p_star=1");
		return out;
	}

	const CycleMatrix m = reshape(shifted, out.p_star);
	out.n_c = m.n_cycles;
	const Rank1Energy energy = rank1_energy(m);
	out.r1_centered = energy.r1_centered;
	out.bbp_second_spike_subcritical = bbp_second_spike(energy.r1_centered, m.period, m.n_cycles);
	out.headline_regime = energy.r1_centered >= 0.77 && m.n_cycles >= 10;

	if (m.n_cycles < 5) {
		out.route = Route::SeasonalNaive;
		out.reasons.push_back("n_c<5");
	} else if (out.zero_fraction > 0.5) {
		out.route = Route::CrostonLike;
		out.reasons.push_back("zero_fraction>0.5");
	} else if (energy.r1_centered < 0.5) {
		out.route = Route::StlOrEts;
		out.reasons.push_back("r1_centered<0.5");
	} else {
		out.route = Route::Flair;
		out.reasons.push_back("ok");
	}
	return out;
}

}  // namespace flair
