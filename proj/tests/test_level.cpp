#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "flair/level.hpp"
#include "flair/period.hpp"
#include "flair/rng.hpp"

using namespace flair;

namespace {

LevelSeries identity_level(const Eigen::VectorXd& raw) {
	LevelSeries level;
	level.raw = raw;
	level.lambda = 1.0;
	level.transformed.resize(raw.size());
	for (int i = 0; i < raw.size(); ++i) level.transformed[i] = box_cox_forward(raw[i], 1.0);
	level.innovations = level.transformed.array() - level.transformed[raw.size() - 1];
	return level;
}

}  // namespace

TEST_CASE("level invariants after construction") {
	Eigen::VectorXd raw(12);
	for (int i = 0; i < 12; ++i) raw[i] = 30.0 + 2.0 * i;
	const LevelSeries level = build_level(raw);
	REQUIRE(level.innovations[11] == 0.0);  // NLinear anchor
	for (int i = 0; i < 12; ++i) REQUIRE(level.raw[i] > 0.0);
}

TEST_CASE("secondary division") {
	PeriodCandidates hourly = candidates_for(Frequency::Hourly);

	SECTION("hourly P*=24 picks the weekly-over-daily lag sec=7") {
		Eigen::VectorXd raw(28);
		for (int i = 0; i < 28; ++i) raw[i] = 100.0 + (i % 7);
		LevelSeries level = secondary_divide(identity_level(raw), hourly, 24);
		REQUIRE(level.sec == 7);
		REQUIRE(level.sec_index.size() == 7);
		double mean_index = 0.0;
		for (double v : level.sec_index) {
			REQUIRE(v > 0.0);
			mean_index += v;
		}
		REQUIRE(mean_index / 7.0 == Catch::Approx(1.0).margin(1e-9));
	}
	SECTION("P*=168 has no larger candidate: no-op, p stays 3") {
		Eigen::VectorXd raw(20);
		raw.setConstant(50.0);
		LevelSeries level = secondary_divide(identity_level(raw), hourly, 168);
		REQUIRE(level.sec == 0);
		const RidgeFit fit = ridge_fit(level);
		REQUIRE(fit.p == 3);
	}
	SECTION("exact period-7 multiplicative pattern divides out to a constant") {
		const double pattern[] = {0.8, 1.1, 1.3, 0.9, 1.05, 0.95, 0.9};
		Eigen::VectorXd raw(35);
		for (int i = 0; i < 35; ++i) raw[i] = 40.0 * pattern[i % 7];
		LevelSeries level = secondary_divide(identity_level(raw), hourly, 24);
		REQUIRE(level.sec == 7);
		for (int i = 0; i < 35; ++i) {
			REQUIRE(level.transformed[i] == Catch::Approx(level.transformed[0]).margin(1e-9));
		}
	}
}

TEST_CASE("damped trend estimation") {
	SECTION("fewer than 3 differences gives phi = 0") {
		Eigen::VectorXd raw(3);
		raw << 10, 11, 12;
		REQUIRE(damped_trend(identity_level(raw)).phi == 0.0);
	}
	SECTION("constant nonzero increments read as perfect persistence") {
		Eigen::VectorXd raw(20);
		for (int i = 0; i < 20; ++i) raw[i] = 10.0 + 3.0 * i;
		REQUIRE(damped_trend(identity_level(raw)).phi == 1.0 - constants::kPhiEpsilon);
	}
	SECTION("constant level gives phi = 0") {
		Eigen::VectorXd raw(20);
		raw.setConstant(5.0);
		REQUIRE(damped_trend(identity_level(raw)).phi == 0.0);
	}
	SECTION("phi is clipped into [0, 1 - eps]") {
		Rng rng(6);
		Eigen::VectorXd raw(40);
		for (int i = 0; i < 40; ++i) raw[i] = 50.0 + rng.normal();
		const double phi = damped_trend(identity_level(raw)).phi;
		REQUIRE(phi >= 0.0);
		REQUIRE(phi <= 1.0 - constants::kPhiEpsilon);
	}
}

TEST_CASE("forecast_levels") {
	SECTION("zero coefficients reproduce the last level at every step") {
		// A constant level makes the differenced target identically zero, so
		// the averaged deviation coefficients vanish exactly.
		Eigen::VectorXd raw(30);
		raw.setConstant(77.0);
		LevelSeries level = identity_level(raw);
		const RidgeFit fit = ridge_fit(level);
		REQUIRE(fit.coefficients.cwiseAbs().maxCoeff() < 1e-20);
		const auto path = forecast_levels(fit, level, 5, DampedTrend{0.5});
		for (double v : path) REQUIRE(v == Catch::Approx(77.0).margin(1e-9));
	}
	SECTION("phi = 0 freezes every step after the first") {
		Rng rng(9);
		Eigen::VectorXd raw(40);
		double v = 100.0;
		for (int i = 0; i < 40; ++i) {
			v += 1.0 + 0.3 * rng.normal();
			raw[i] = v;
		}
		LevelSeries level = identity_level(raw);
		const RidgeFit fit = ridge_fit(level);
		const auto path = forecast_levels(fit, level, 4, DampedTrend{0.0});
		REQUIRE(path[1] == Catch::Approx(path[0]).margin(1e-12));
		REQUIRE(path[3] == Catch::Approx(path[0]).margin(1e-12));
	}
	SECTION("exact linear level extrapolates the closed-form line") {
		const double a = 20000.0;
		const double b = 2.0;
		const int n_c = 100;
		Eigen::VectorXd raw(n_c);
		for (int i = 0; i < n_c; ++i) raw[i] = a + b * (i + 1);
		LevelSeries level = identity_level(raw);
		const RidgeFit fit = ridge_fit(level);
		const DampedTrend phi = damped_trend(level);
		REQUIRE(phi.phi == 1.0 - constants::kPhiEpsilon);
		const auto path = forecast_levels(fit, level, 3, phi);
		for (int h = 1; h <= 3; ++h) {
			const double truth = a + b * (n_c + h);
			REQUIRE(path[h - 1] == Catch::Approx(truth).epsilon(1e-6));
		}
	}
}

TEST_CASE("ridge_fit wires the secondary lag into the feature set") {
	Eigen::VectorXd raw(40);
	Rng rng(14);
	for (int i = 0; i < 40; ++i) raw[i] = 60.0 + 5.0 * ((i % 4) == 0) + 0.1 * rng.normal();
	PeriodCandidates cands;
	cands.set = {6, 24};  // sec = 24 / 6 = 4 for p_star = 6
	LevelSeries level = secondary_divide(identity_level(raw), cands, 6);
	REQUIRE(level.sec == 4);
	const RidgeFit fit = ridge_fit(level);
	REQUIRE(fit.p == 4);
	REQUIRE(fit.n_train == 36);  // n_c - sec
	REQUIRE(fit.coefficients.size() == 4);
	REQUIRE(fit.leverage_test > 0.0);
}
