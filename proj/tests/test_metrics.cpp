#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "flair/metrics.hpp"
#include "flair/rng.hpp"

using namespace flair;

TEST_CASE("seasonal naive repeats the last observed cycle") {
	const std::vector<double> y = {1, 2, 3, 4};
	REQUIRE(seasonal_naive(y, 2, 3) == std::vector<double>{3, 4, 3});
	REQUIRE(seasonal_naive(y, 1, 2) == std::vector<double>{4, 4});
	// P larger than the series falls back to last-value carry-forward.
	REQUIRE(seasonal_naive(y, 9, 2) == std::vector<double>{4, 4});
}

TEST_CASE("seasonal naive has zero error on a noiseless periodic series") {
	std::vector<double> y;
	for (int i = 0; i < 21; ++i) y.push_back(1.0 + (i % 7));
	const auto f = seasonal_naive(y, 7, 14);
	for (int h = 0; h < 14; ++h) {
		REQUIRE(f[h] == 1.0 + (h % 7));
	}
}

TEST_CASE("mase") {
	SECTION("perfect forecast scores 0") {
		const std::vector<double> train = {1, 5, 2, 6, 3, 7};
		const std::vector<double> actual = {4, 8};
		REQUIRE(mase(actual, actual, train, 2).value() == 0.0);
	}
	SECTION("hand case against the scaled denominator") {
		const std::vector<double> train = {1, 2, 4, 7};  // lag-1 diffs 1, 2, 3 -> mean 2
		const std::vector<double> actual = {10.0};
		const std::vector<double> forecast = {6.0};
		REQUIRE(mase(actual, forecast, train, 1).value() == Catch::Approx(2.0));
	}
	SECTION("constant training series is flagged (nullopt)") {
		const std::vector<double> train(8, 3.0);
		const std::vector<double> actual = {1.0};
		REQUIRE_FALSE(mase(actual, actual, train, 1).has_value());
	}
	SECTION("seasonal-naive forecast of a stationary periodic series scores near 1") {
		Rng rng(12);
		double total = 0.0;
		const int reps = 200;
		for (int r = 0; r < reps; ++r) {
			std::vector<double> y;
			for (int i = 0; i < 7 * 30; ++i) y.push_back(10.0 + (i % 7) + rng.normal());
			const std::vector<double> train(y.begin(), y.end() - 7);
			const std::vector<double> actual(y.end() - 7, y.end());
			const auto f = seasonal_naive(train, 7, 7);
			total += mase(actual, f, train, 7).value();
		}
		REQUIRE(total / reps == Catch::Approx(1.0).margin(0.1));
	}
}

TEST_CASE("sample crps") {
	SECTION("all samples equal to the actual score 0") {
		const std::vector<double> samples(10, 2.0);
		REQUIRE(sample_crps(2.0, samples) == Catch::Approx(0.0).margin(1e-14));
	}
	SECTION("hand case {0,2} against 1 gives 0.5") {
		const std::vector<double> samples = {0.0, 2.0};
		REQUIRE(sample_crps(1.0, samples) == Catch::Approx(0.5).epsilon(1e-14));
	}
	SECTION("degenerate single-valued ensemble reduces to absolute error") {
		const std::vector<double> samples(5, 7.0);
		REQUIRE(sample_crps(3.0, samples) == Catch::Approx(4.0).epsilon(1e-14));
	}
	SECTION("sorted formula matches the O(s^2) brute force (oracle)") {
		Rng rng(91);
		for (int trial = 0; trial < 100; ++trial) {
			const int s = 2 + static_cast<int>(rng.index(60));
			std::vector<double> samples(s);
			for (double& v : samples) v = 10.0 * rng.normal();
			const double actual = 5.0 * rng.normal();

			double abs_term = 0.0;
			for (double v : samples) abs_term += std::abs(v - actual);
			abs_term /= s;
			double pair_term = 0.0;
			for (double a : samples) {
				for (double b : samples) pair_term += std::abs(a - b);
			}
			pair_term /= static_cast<double>(s) * s;
			const double expected = abs_term - 0.5 * pair_term;
			REQUIRE(sample_crps(actual, samples) == Catch::Approx(expected).margin(1e-10));
		}
	}
}

TEST_CASE("weighted quantile loss") {
	SECTION("perfect quantiles score 0") {
		const std::vector<double> actual = {2.0, 4.0};
		Eigen::MatrixXd q(3, 2);
		q << 2, 4, 2, 4, 2, 4;
		const std::vector<double> levels = {0.25, 0.5, 0.75};
		REQUIRE(wql(actual, q, levels).value() == Catch::Approx(0.0).margin(1e-14));
	}
	SECTION("single 0.5 level reduces to scaled MAE of the median") {
		const std::vector<double> actual = {2.0, 6.0};
		Eigen::MatrixXd q(1, 2);
		q << 3.0, 4.0;
		const std::vector<double> levels = {0.5};
		// 2 * (0.5*1 + 0.5*2) / (1 * 8) = mean abs error / mean abs actual
		const double expected = (1.0 + 2.0) / 8.0;
		REQUIRE(wql(actual, q, levels).value() == Catch::Approx(expected).epsilon(1e-14));
	}
	SECTION("hand pinball case: underprediction at the 0.1 quantile") {
		const std::vector<double> actual = {2.0};
		Eigen::MatrixXd q(1, 1);
		q << 1.0;
		const std::vector<double> levels = {0.1};
		// pinball = 0.1 * (2 - 1) = 0.1; wql = 2 * 0.1 / (1 * 2) = 0.1
		REQUIRE(wql(actual, q, levels).value() == Catch::Approx(0.1).epsilon(1e-14));
	}
	SECTION("all-zero actuals are flagged") {
		const std::vector<double> actual = {0.0, 0.0};
		Eigen::MatrixXd q(1, 2);
		q << 0, 0;
		const std::vector<double> levels = {0.5};
		REQUIRE_FALSE(wql(actual, q, levels).has_value());
	}
	SECTION("brute-force oracle on random cases") {
		Rng rng(17);
		const std::vector<double> levels = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
		for (int trial = 0; trial < 100; ++trial) {
			const int h = 1 + static_cast<int>(rng.index(8));
			std::vector<double> actual(h);
			for (double& v : actual) v = 1.0 + 10.0 * rng.uniform();
			Eigen::MatrixXd q(9, h);
			for (int a = 0; a < 9; ++a) {
				for (int b = 0; b < h; ++b) q(a, b) = 10.0 * rng.normal();
			}
			double loss = 0.0;
			double denom = 0.0;
			for (double v : actual) denom += std::abs(v);
			for (int a = 0; a < 9; ++a) {
				for (int b = 0; b < h; ++b) {
					const double u = actual[b] - q(a, b);
					loss += (u >= 0) ? levels[a] * u : (levels[a] - 1.0) * u;
				}
			}
			const double expected = 2.0 * loss / (9.0 * denom);
			REQUIRE(wql(actual, q, levels).value() == Catch::Approx(expected).margin(1e-10));
		}
	}
}

TEST_CASE("metric non-negativity on random inputs") {
	Rng rng(3);
	for (int trial = 0; trial < 50; ++trial) {
		const int h = 2 + static_cast<int>(rng.index(10));
		std::vector<double> actual(h);
		std::vector<double> forecast(h);
		std::vector<double> train(30);
		for (double& v : actual) v = rng.normal() * 5.0;
		for (double& v : forecast) v = rng.normal() * 5.0;
		for (double& v : train) v = rng.normal() * 5.0 + 1.0;
		const auto m = mase(actual, forecast, train, 1);
		REQUIRE(m.value() >= 0.0);
		std::vector<double> samples(20);
		for (double& v : samples) v = rng.normal();
		REQUIRE(sample_crps(actual[0], samples) >= 0.0);
	}
}

TEST_CASE("interval coverage counts inclusively") {
	const std::vector<double> actual = {1.0, 2.0, 3.0, 4.0};
	const std::vector<double> lo = {1.0, 2.5, 2.0, 0.0};
	const std::vector<double> hi = {2.0, 3.0, 3.0, 1.0};
	REQUIRE(interval_coverage(actual, lo, hi) == Catch::Approx(0.5));
}
