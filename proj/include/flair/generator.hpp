#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "flair/corpus.hpp"
#include "flair/rng.hpp"
#include "flair/series.hpp"

namespace flair {

enum class LevelKind { RandomWalk, QuadraticDrift, Flat };
enum class ShapeKind { Uniform, Peaked2to1, SolarNightZeros };

inline std::string level_kind_name(LevelKind k) {
	switch (k) {
		case LevelKind::RandomWalk: return "random_walk";
		case LevelKind::QuadraticDrift: return "quadratic_drift";
		case LevelKind::Flat: return "flat";
	}
	return "flat";
}

inline std::string shape_kind_name(ShapeKind k) {
	switch (k) {
		case ShapeKind::Uniform: return "uniform";
		case ShapeKind::Peaked2to1: return "peaked2to1";
		case ShapeKind::SolarNightZeros: return "solar_night_zeros";
	}
	return "uniform";
}

inline LevelKind parse_level_kind(const std::string& s) {
	if (s == "random_walk") return LevelKind::RandomWalk;
	if (s == "quadratic_drift") return LevelKind::QuadraticDrift;
	if (s == "flat") return LevelKind::Flat;
	throw IngestError("unknown level_kind '" + s + "'");
}

inline ShapeKind parse_shape_kind(const std::string& s) {
	if (s == "uniform") return ShapeKind::Uniform;
	if (s == "peaked2to1") return ShapeKind::Peaked2to1;
	if (s == "solar_night_zeros") return ShapeKind::SolarNightZeros;
	throw IngestError("unknown shape_kind '" + s + "'");
}

// Locally-stationary rank-1 generator: M_{j,i} = L(i/n_c) S_j + eps_{j,i}.
struct Lsr1GenSpec {
	int period = 24;
	int n_cycles = 100;
	double sigma = 0.5;
	LevelKind level_kind = LevelKind::RandomWalk;
	ShapeKind shape_kind = ShapeKind::Uniform;
	std::uint64_t seed = 0;
	int n_series = 1;
	int test_cycles = 1;
	int family_size = 5;
};

struct Lsr1Series {
	std::vector<double> train;
	std::vector<double> test;
	std::vector<double> truth_test;  // noiseless L*S continuation
	Eigen::VectorXd shape;
	std::vector<double> levels;      // train + test cycles
};

namespace detail {

inline Eigen::VectorXd make_shape(ShapeKind kind, int p) {
	Eigen::VectorXd s(p);
	switch (kind) {
		case ShapeKind::Uniform:
			s.setConstant(1.0);
			break;
		case ShapeKind::Peaked2to1:
			// Day/night profile: first half of the cycle carries twice the load.
			for (int j = 0; j < p; ++j) s[j] = (j < (p + 1) / 2) ? 2.0 : 1.0;
			break;
		case ShapeKind::SolarNightZeros:
			for (int j = 0; j < p; ++j) s[j] = (j < (p + 1) / 2) ? 1.0 : 1e-9;
			break;
	}
	return s / s.sum();
}

inline std::vector<double> make_levels(LevelKind kind, int total_cycles, int train_cycles,
                                       Rng& rng) {
	std::vector<double> levels(total_cycles);
	const double base = 50.0 + 100.0 * rng.uniform();
	switch (kind) {
		case LevelKind::Flat:
			for (double& v : levels) v = base;
			break;
		case LevelKind::QuadraticDrift: {
			const double b = 0.1 + 0.4 * rng.uniform();
			const double c = -0.2 + 0.6 * rng.uniform();
			for (int i = 0; i < total_cycles; ++i) {
				const double u = static_cast<double>(i + 1) / train_cycles;
				levels[i] = base * (1.0 + b * u + c * u * u);
				levels[i] = std::max(levels[i], 1.0);
			}
			break;
		}
		case LevelKind::RandomWalk: {
			const double step = 0.02 * base;
			double value = base;
			for (int i = 0; i < total_cycles; ++i) {
				value += step * rng.normal();
				value = std::max(value, 1.0);
				levels[i] = value;
			}
			break;
		}
	}
	return levels;
}

}  // namespace detail

inline Lsr1Series generate_lsr1_series(const Lsr1GenSpec& spec, Rng& rng) {
	if (spec.period < 1 || spec.n_cycles < 1) {
		throw std::invalid_argument("generate_lsr1_series: period and n_cycles must be >= 1");
	}
	const int total = spec.n_cycles + spec.test_cycles;
	Lsr1Series out;
	out.shape = detail::make_shape(spec.shape_kind, spec.period);
	out.levels = detail::make_levels(spec.level_kind, total, spec.n_cycles, rng);

	out.train.reserve(static_cast<std::size_t>(spec.n_cycles) * spec.period);
	out.test.reserve(static_cast<std::size_t>(spec.test_cycles) * spec.period);
	out.truth_test.reserve(out.test.capacity());
	for (int i = 0; i < total; ++i) {
		for (int j = 0; j < spec.period; ++j) {
			const double mean = out.levels[i] * out.shape[j];
			const double value = mean + spec.sigma * rng.normal();
			if (i < spec.n_cycles) {
				out.train.push_back(value);
			} else {
				out.test.push_back(value);
				out.truth_test.push_back(mean);
			}
		}
	}
	return out;
}

// Frequency tag whose candidate set contains the generator period, so the
// BIC selector can recover it.
inline Frequency frequency_for_period(int period) {
	switch (period) {
		case 24:
		case 168: return Frequency::Hourly;
		case 7:
		case 30: return Frequency::Daily;
		case 12: return Frequency::Monthly;
		case 4: return Frequency::Quarterly;
		case 52: return Frequency::Weekly;
		case 48:
		case 336: return Frequency::ThirtyMinute;
		case 96: return Frequency::FifteenMinute;
		case 144: return Frequency::TenMinute;
		case 288: return Frequency::FiveMinute;
		case 360: return Frequency::TenSecond;
		default: return Frequency::Unknown;
	}
}

inline Corpus generate_lsr1(const Lsr1GenSpec& spec) {
	Corpus corpus;
	corpus.source = "lsr1";
	Rng root(spec.seed);
	const Frequency freq = frequency_for_period(spec.period);
	for (int s = 0; s < spec.n_series; ++s) {
		Rng rng = root.fork(static_cast<std::uint64_t>(s));
		Lsr1Series series = generate_lsr1_series(spec, rng);
		CorpusEntry entry;
		entry.id = "lsr1_" + std::to_string(s);
		entry.family = "fam_" + std::to_string(s / std::max(1, spec.family_size));
		entry.freq = freq;
		entry.train = std::move(series.train);
		entry.test = std::move(series.test);
		corpus.entries.push_back(std::move(entry));
	}
	return corpus;
}

}  // namespace flair
