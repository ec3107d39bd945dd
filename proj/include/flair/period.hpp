#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "flair/reshape.hpp"
#include "flair/series.hpp"

namespace flair {

namespace constants {
// Minimum complete cycles for a non-degenerate Level x Shape decomposition.
inline constexpr int kMinCompleteCycles = 3;
// Relative floor applied to the rank-1 RSS before the BIC log.
inline constexpr double kRssRelativeFloor = 1e-12;
}  // namespace constants

// Calendar candidate periods derived from the frequency tag.
struct PeriodCandidates {
	std::vector<int> set;  // ascending, all >= 2; may be empty
	Frequency derived_from = Frequency::Unknown;
};

inline PeriodCandidates candidates_for(Frequency freq) {
	PeriodCandidates out;
	out.derived_from = freq;
	switch (freq) {
		case Frequency::Hourly: out.set = {24, 168}; break;
		case Frequency::Daily: out.set = {7, 30}; break;
		case Frequency::Monthly: out.set = {12}; break;
		case Frequency::Quarterly: out.set = {4}; break;
		case Frequency::Weekly: out.set = {52}; break;
		case Frequency::ThirtyMinute: out.set = {48, 336}; break;
		case Frequency::FifteenMinute: out.set = {96}; break;
		case Frequency::TenMinute: out.set = {144}; break;
		case Frequency::FiveMinute: out.set = {288}; break;
		case Frequency::TenSecond: out.set = {360}; break;
		case Frequency::Yearly:
		case Frequency::Unknown:
			break;  // empty set forces P=1
	}
	return out;
}

// Smallest candidate P2 > p_star that is a multiple of p_star and has at
// least two full secondary cycles of data; this drives both the secondary
// index division and the extra Ridge lag feature.
inline std::optional<int> secondary_lag(const PeriodCandidates& candidates, int p_star, int n_c) {
	for (int p2 : candidates.set) {
		if (p2 <= p_star || p2 % p_star != 0) continue;
		const int sec = p2 / p_star;
		if (n_c >= 2 * sec) return sec;
	}
	return std::nullopt;
}

enum class PeriodGuard { None, TooFewCycles, DofGuard };

struct PeriodChoice {
	int p_star = 1;
	int p_star_bic = 1;  // BIC argmin before the DoF fallback (MDL choice)
	std::map<int, double> bic_scores;  // includes the P=1 null
	PeriodGuard guard_fired = PeriodGuard::None;
};

// BIC over rank-1 residuals (Eq.-2 style): each candidate P_c >= 2 is scored
// on its own trailing reshaped sample of n = P_c * n_c entries with
// RSS = sum_{i>=2} sigma_i^2 and k = P_c + n_c - 1; the P=1 null uses the
// full series with RSS = n Var(y) and k = 1. Ties go to the smaller P.
inline PeriodChoice select_period(const ShiftedSeries& series,
                                  const PeriodCandidates& candidates,
                                  int base_feature_count = 3,
                                  int min_complete = constants::kMinCompleteCycles,
                                  int max_cycles = constants::kMaxCompleteCycles) {
	PeriodChoice out;
	const std::size_t n_full = series.values.size();

	// P=1 null: mean + noise.
	double mean = 0.0;
	double sq = 0.0;
	for (double v : series.values) mean += v;
	mean /= static_cast<double>(n_full);
	double centered_ss = 0.0;
	for (double v : series.values) {
		centered_ss += (v - mean) * (v - mean);
		sq += v * v;
	}
	const double null_floor = constants::kRssRelativeFloor * sq;
	const double n1 = static_cast<double>(n_full);
	const double bic_null = n1 * std::log(std::max(centered_ss, null_floor) / n1) + std::log(n1);
	out.bic_scores[1] = bic_null;

	double best_bic = bic_null;
	int best_p = 1;
	std::map<int, CycleMatrix> reshaped;
	bool any_eligible = false;
	bool any_too_few = false;

	for (int p_c : candidates.set) {
		if (n_full < static_cast<std::size_t>(p_c)) {
			any_too_few = true;
			continue;
		}
		CycleMatrix m = reshape(series, p_c, max_cycles);
		if (m.n_cycles < min_complete) {
			any_too_few = true;
			continue;
		}
		any_eligible = true;
		const double total_energy = m.singular_values.squaredNorm();
		const double rss_raw = total_energy - m.singular_values[0] * m.singular_values[0];
		const double rss = std::max(rss_raw, constants::kRssRelativeFloor * total_energy);
		const double n_entries = static_cast<double>(p_c) * m.n_cycles;
		const double k = static_cast<double>(p_c) + m.n_cycles - 1;
		const double bic = n_entries * std::log(rss / n_entries) + k * std::log(n_entries);
		out.bic_scores[p_c] = bic;
		if (bic < best_bic) {
			best_bic = bic;
			best_p = p_c;
		}
		reshaped.emplace(p_c, std::move(m));
	}

	if (!candidates.set.empty() && !any_eligible && any_too_few) {
		out.p_star = 1;
		out.p_star_bic = 1;
		out.guard_fired = PeriodGuard::TooFewCycles;
		return out;
	}
	out.p_star_bic = best_p;

	if (best_p >= 2) {
		// DoF guard on the Level training sample (the n_c cycle aggregates).
		const int n_c = reshaped.at(best_p).n_cycles;
		const auto sec = secondary_lag(candidates, best_p, n_c);
		const int p_features = sec ? base_feature_count + 1 : base_feature_count;
		if (n_c < 2 * p_features) {
			out.p_star = 1;
			out.guard_fired = PeriodGuard::DofGuard;
			return out;
		}
	}

	out.p_star = best_p;
	return out;
}

}  // namespace flair
