#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "flair/series.hpp"

using namespace flair;

TEST_CASE("positivity_shift follows max(1 - min, 1)") {
	SECTION("min -4 gives shift 5") {
		TimeSeries ts({-4.0, 0.0, 2.0}, Frequency::Daily);
		const auto shifted = positivity_shift(ts);
		REQUIRE(shifted.shift == 5.0);
		REQUIRE(shifted.values[0] == 1.0);
	}
	SECTION("min 3 gives shift 1") {
		TimeSeries ts({3.0, 5.0}, Frequency::Daily);
		const auto shifted = positivity_shift(ts);
		REQUIRE(shifted.shift == 1.0);
		REQUIRE(shifted.values[0] == 4.0);
	}
	SECTION("all zeros become all ones") {
		TimeSeries ts({0.0, 0.0, 0.0}, Frequency::Daily);
		const auto shifted = positivity_shift(ts);
		REQUIRE(shifted.shift == 1.0);
		for (double v : shifted.values) REQUIRE(v == 1.0);
	}
}

TEST_CASE("positivity_shift invariants") {
	TimeSeries ts({-7.5, 2.25, 13.0, -1.0}, Frequency::Hourly);
	const auto once = positivity_shift(ts);

	SECTION("second application has shift 1") {
		TimeSeries again(once.values, Frequency::Hourly);
		const auto twice = positivity_shift(again);
		REQUIRE(twice.shift == 1.0);
	}
	SECTION("round trip is bit-exact") {
		for (std::size_t i = 0; i < once.values.size(); ++i) {
			REQUIRE(once.values[i] - once.shift == ts.values()[i]);
		}
	}
	SECTION("all shifted values are >= 1") {
		for (double v : once.values) REQUIRE(v >= 1.0);
	}
}

TEST_CASE("TimeSeries rejects bad input at ingestion") {
	REQUIRE_THROWS_AS(TimeSeries({}, Frequency::Daily), IngestError);
	REQUIRE_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::quiet_NaN()}, Frequency::Daily),
	                  IngestError);
	REQUIRE_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::infinity()}, Frequency::Daily),
	                  IngestError);
}

TEST_CASE("detect_integer_valued uses 1e-9 absolute tolerance") {
	REQUIRE(detect_integer_valued(std::vector<double>{1.0, 2.0, 5.0}));
	REQUIRE_FALSE(detect_integer_valued(std::vector<double>{1.0, 2.5}));
	REQUIRE(detect_integer_valued(std::vector<double>{3.0000000001}));
	REQUIRE_FALSE(detect_integer_valued(std::vector<double>{3.00001}));
	TimeSeries counts({4.0, 7.0, 0.0}, Frequency::Daily);
	REQUIRE(counts.is_integer_valued());
}

TEST_CASE("frequency codes parse to tags and unknown falls through") {
	REQUIRE(parse_frequency("H") == Frequency::Hourly);
	REQUIRE(parse_frequency("D") == Frequency::Daily);
	REQUIRE(parse_frequency("W") == Frequency::Weekly);
	REQUIRE(parse_frequency("M") == Frequency::Monthly);
	REQUIRE(parse_frequency("Q") == Frequency::Quarterly);
	REQUIRE(parse_frequency("Y") == Frequency::Yearly);
	REQUIRE(parse_frequency("10S") == Frequency::TenSecond);
	REQUIRE(parse_frequency("5T") == Frequency::FiveMinute);
	REQUIRE(parse_frequency("10T") == Frequency::TenMinute);
	REQUIRE(parse_frequency("15T") == Frequency::FifteenMinute);
	REQUIRE(parse_frequency("30T") == Frequency::ThirtyMinute);
	REQUIRE(parse_frequency("fortnightly") == Frequency::Unknown);
	REQUIRE(frequency_code(parse_frequency("15T")) == "15T");
}

TEST_CASE("Horizon validates steps") {
	REQUIRE_THROWS_AS(Horizon(0), std::invalid_argument);
	REQUIRE(Horizon(3).steps == 3);
}
