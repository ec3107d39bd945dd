#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <vector>

#include "flair/rng.hpp"
#include "flair/shape.hpp"

using namespace flair;

namespace {

CycleMatrix from_matrix(Eigen::MatrixXd entries) {
	CycleMatrix m;
	m.period = static_cast<int>(entries.rows());
	m.n_cycles = static_cast<int>(entries.cols());
	m.entries = std::move(entries);
	m.singular_values = singular_values_of(m.entries);
	return m;
}

CycleMatrix random_positive_matrix(int p, int n_c, Rng& rng) {
	Eigen::MatrixXd e(p, n_c);
	for (int i = 0; i < p; ++i) {
		for (int j = 0; j < n_c; ++j) e(i, j) = 1.0 + 9.0 * rng.uniform();
	}
	return from_matrix(std::move(e));
}

const ShapeVariant kAllVariants[] = {
    ShapeVariant::FrozenK2,      ShapeVariant::Ewma,      ShapeVariant::FourierJ1,
    ShapeVariant::SavitzkyGolay, ShapeVariant::JsUniform, ShapeVariant::JsHarmonic,
    ShapeVariant::PooledMle,     ShapeVariant::Rank2Svd,  ShapeVariant::Rank3Svd};

}  // namespace

TEST_CASE("frozen_shape hand cases") {
	SECTION("[[1,2],[3,6]]: both proportion columns equal (0.25, 0.75)") {
		Eigen::MatrixXd e(2, 2);
		e << 1, 2, 3, 6;
		const auto s = frozen_shape(from_matrix(e), 2);
		REQUIRE(s.weights[0] == Catch::Approx(0.25).epsilon(1e-14));
		REQUIRE(s.weights[1] == Catch::Approx(0.75).epsilon(1e-14));
	}
	SECTION("[[1,2],[3,5]]: mean of (0.25,0.75) and (2/7,5/7)") {
		Eigen::MatrixXd e(2, 2);
		e << 1, 2, 3, 5;
		const auto s = frozen_shape(from_matrix(e), 2);
		REQUIRE(s.weights[0] == Catch::Approx(15.0 / 56.0).epsilon(1e-14));
		REQUIRE(s.weights[1] == Catch::Approx(41.0 / 56.0).epsilon(1e-14));
	}
	SECTION("K=1 equals the last column's proportions") {
		Eigen::MatrixXd e(3, 2);
		e << 1, 2, 1, 3, 1, 5;
		const auto s = frozen_shape(from_matrix(e), 1);
		REQUIRE(s.weights[0] == Catch::Approx(0.2).epsilon(1e-14));
		REQUIRE(s.weights[1] == Catch::Approx(0.3).epsilon(1e-14));
		REQUIRE(s.weights[2] == Catch::Approx(0.5).epsilon(1e-14));
	}
	SECTION("K larger than n_c clips to n_c") {
		Eigen::MatrixXd e(2, 2);
		e << 1, 2, 3, 6;
		const auto s = frozen_shape(from_matrix(e), 10);
		REQUIRE(s.k_used == 2);
	}
}

TEST_CASE("frozen_shape scale invariance and permutation equivariance") {
	Rng rng(5);
	auto m = random_positive_matrix(6, 8, rng);

	SECTION("power-of-two scalings are bit-exact") {
		auto scaled = m;
		scaled.entries *= 4.0;
		const auto a = frozen_shape(m, 2);
		const auto b = frozen_shape(scaled, 2);
		for (int j = 0; j < 6; ++j) REQUIRE(a.weights[j] == b.weights[j]);
	}
	SECTION("arbitrary scalings agree to near machine precision") {
		auto scaled = m;
		scaled.entries *= 3.7;
		const auto a = frozen_shape(m, 2);
		const auto b = frozen_shape(scaled, 2);
		for (int j = 0; j < 6; ++j) {
			REQUIRE(a.weights[j] == Catch::Approx(b.weights[j]).epsilon(1e-12));
		}
	}
	SECTION("row permutation permutes the shape identically") {
		Eigen::MatrixXd perm = m.entries;
		perm.row(0).swap(perm.row(3));
		const auto a = frozen_shape(m, 2);
		const auto b = frozen_shape(from_matrix(perm), 2);
		REQUIRE(b.weights[0] == a.weights[3]);
		REQUIRE(b.weights[3] == a.weights[0]);
		REQUIRE(b.weights[1] == a.weights[1]);
	}
}

TEST_CASE("every variant stays on the simplex") {
	Rng rng(13);
	for (int trial = 0; trial < 10; ++trial) {
		auto m = random_positive_matrix(5 + static_cast<int>(rng.index(20)),
		                                4 + static_cast<int>(rng.index(20)), rng);
		for (ShapeVariant v : kAllVariants) {
			const auto s = variant_shape(m, v);
			REQUIRE(s.weights.sum() == Catch::Approx(1.0).margin(1e-12));
			for (int j = 0; j < s.weights.size(); ++j) {
				REQUIRE(s.weights[j] >= constants::kShapePositivityFloor / 2);
			}
		}
	}
}

TEST_CASE("exact rank-1 fixed points") {
	Rng rng(17);

	SECTION("uniform-shape rank-1 matrix: every variant returns uniform") {
		// Projection and smoothing are the identity on a flat profile, so all
		// eight variants coincide with the frozen baseline here.
		const int p = 8;
		Eigen::MatrixXd e(p, 6);
		for (int j = 0; j < 6; ++j) e.col(j).setConstant(2.0 + j);
		const auto m = from_matrix(e);
		const auto baseline = frozen_shape(m, 2);
		for (ShapeVariant v : kAllVariants) {
			const auto s = variant_shape(m, v);
			for (int j = 0; j < p; ++j) {
				REQUIRE(s.weights[j] == Catch::Approx(baseline.weights[j]).margin(1e-8));
			}
		}
	}
	SECTION("general rank-1 matrix: structure-preserving variants match frozen") {
		const int p = 7;
		Eigen::VectorXd shape(p);
		for (int j = 0; j < p; ++j) shape[j] = 0.5 + rng.uniform();
		Eigen::VectorXd level(5);
		for (int i = 0; i < 5; ++i) level[i] = 3.0 + 4.0 * rng.uniform();
		const auto m = from_matrix(shape * level.transpose());
		const auto baseline = frozen_shape(m, 2);
		const ShapeVariant preserving[] = {ShapeVariant::Ewma, ShapeVariant::JsUniform,
		                                   ShapeVariant::JsHarmonic, ShapeVariant::PooledMle,
		                                   ShapeVariant::Rank2Svd, ShapeVariant::Rank3Svd};
		for (ShapeVariant v : preserving) {
			const auto s = variant_shape(m, v);
			for (int j = 0; j < p; ++j) {
				REQUIRE(s.weights[j] == Catch::Approx(baseline.weights[j]).margin(1e-8));
			}
		}
	}
}

TEST_CASE("pooled MLE equals frozen K=n_c when column sums are equal") {
	Rng rng(23);
	Eigen::MatrixXd e(6, 9);
	for (int i = 0; i < 6; ++i) {
		for (int j = 0; j < 9; ++j) e(i, j) = 1.0 + rng.uniform();
	}
	for (int j = 0; j < 9; ++j) e.col(j) *= 10.0 / e.col(j).sum();
	const auto m = from_matrix(e);
	const auto pooled = variant_shape(m, ShapeVariant::PooledMle);
	const auto frozen_all = frozen_shape(m, 9);
	for (int j = 0; j < 6; ++j) {
		REQUIRE(pooled.weights[j] == Catch::Approx(frozen_all.weights[j]).epsilon(1e-12));
	}
}

TEST_CASE("James-Stein with full shrinkage returns the uniform profile") {
	// Column profiles vary wildly across cycles while their pooled mean sits
	// next to uniform, so the positive-part factor hits zero and the estimate
	// collapses onto the target exactly.
	Eigen::MatrixXd e(4, 8);
	e.setConstant(1.0);
	for (int j = 0; j < 8; ++j) {
		e(j % 4, j) = (j == 7) ? 101.0 : 100.0;
	}
	const auto s = variant_shape(from_matrix(e), ShapeVariant::JsUniform);
	for (int j = 0; j < 4; ++j) {
		REQUIRE(s.weights[j] == Catch::Approx(0.25).epsilon(1e-9));
	}
}

TEST_CASE("EWMA hand case with two columns") {
	// Proportions: col0 = (0.25, 0.75), col1 = (0.5, 0.5); weights (0.7, 1).
	Eigen::MatrixXd e(2, 2);
	e << 1, 2, 3, 2;
	const auto s = variant_shape(from_matrix(e), ShapeVariant::Ewma);
	const double expected0 = (0.7 * 0.25 + 1.0 * 0.5) / 1.7;
	REQUIRE(s.weights[0] == Catch::Approx(expected0).epsilon(1e-12));
	REQUIRE(s.weights[1] == Catch::Approx(1.0 - expected0).epsilon(1e-12));
}

TEST_CASE("rank variants fall back to frozen on degenerate spectra") {
	// Constant columns: sigma_2 = 0.
	Eigen::MatrixXd e(4, 5);
	Eigen::VectorXd shape(4);
	shape << 1, 2, 3, 4;
	for (int j = 0; j < 5; ++j) e.col(j) = shape;
	const auto m = from_matrix(e);
	const auto baseline = frozen_shape(m, 2);
	for (ShapeVariant v : {ShapeVariant::Rank2Svd, ShapeVariant::Rank3Svd}) {
		const auto s = variant_shape(m, v);
		for (int j = 0; j < 4; ++j) {
			REQUIRE(s.weights[j] == Catch::Approx(baseline.weights[j]).margin(1e-12));
		}
	}
}

TEST_CASE("variant names round-trip through the CLI flag parser") {
	for (ShapeVariant v : kAllVariants) {
		const auto parsed = parse_shape_variant(shape_variant_name(v));
		REQUIRE(parsed.has_value());
		REQUIRE(*parsed == v);
	}
	REQUIRE_FALSE(parse_shape_variant("nope").has_value());
}
