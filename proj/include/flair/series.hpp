#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flair {

// Raised on malformed or non-finite input data (CLI maps it to exit code 2).
class IngestError : public std::runtime_error {
public:
	explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

enum class Frequency {
	TenSecond,
	FiveMinute,
	TenMinute,
	FifteenMinute,
	ThirtyMinute,
	Hourly,
	Daily,
	Weekly,
	Monthly,
	Quarterly,
	Yearly,
	Unknown,
};

// Pandas-style codes; anything unrecognised maps to Unknown, which later
// forces the P=1 cascade branch.
inline Frequency parse_frequency(std::string_view code) {
	if (code == "H" || code == "h" || code == "1H") return Frequency::Hourly;
	if (code == "D" || code == "d" || code == "1D") return Frequency::Daily;
	if (code == "W" || code == "w") return Frequency::Weekly;
	if (code == "M" || code == "MS" || code == "ME") return Frequency::Monthly;
	if (code == "Q" || code == "QS" || code == "QE") return Frequency::Quarterly;
	if (code == "Y" || code == "A" || code == "YE") return Frequency::Yearly;
	if (code == "10S") return Frequency::TenSecond;
	if (code == "5T" || code == "5min") return Frequency::FiveMinute;
	if (code == "10T" || code == "10min") return Frequency::TenMinute;
	if (code == "15T" || code == "15min") return Frequency::FifteenMinute;
	if (code == "30T" || code == "30min") return Frequency::ThirtyMinute;
	return Frequency::Unknown;
}

inline std::string_view frequency_code(Frequency f) {
	switch (f) {
		case Frequency::TenSecond: return "10S";
		case Frequency::FiveMinute: return "5T";
		case Frequency::TenMinute: return "10T";
		case Frequency::FifteenMinute: return "15T";
		case Frequency::ThirtyMinute: return "30T";
		case Frequency::Hourly: return "H";
		case Frequency::Daily: return "D";
		case Frequency::Weekly: return "W";
		case Frequency::Monthly: return "M";
		case Frequency::Quarterly: return "Q";
		case Frequency::Yearly: return "Y";
		case Frequency::Unknown: return "unknown";
	}
	return "unknown";
}

// True iff every value is a whole number within absolute tolerance 1e-9.
inline bool detect_integer_valued(std::span<const double> values) {
	constexpr double kTol = 1e-9;
	for (double v : values) {
		if (std::abs(v - std::round(v)) > kTol) return false;
	}
	return true;
}

// A univariate regularly-sampled series. Values are validated at construction
// and immutable afterwards; instances are safe to share across threads.
class TimeSeries {
public:
	TimeSeries(std::vector<double> values, Frequency freq)
	    : values_(std::move(values)), freq_(freq) {
		if (values_.empty()) {
			throw IngestError("TimeSeries: empty series");
		}
		for (std::size_t i = 0; i < values_.size(); ++i) {
			if (!std::isfinite(values_[i])) {
				throw IngestError("TimeSeries: non-finite value at position " + std::to_string(i));
			}
		}
		integer_valued_ = detect_integer_valued(values_);
	}

	const std::vector<double>& values() const { return values_; }
	Frequency freq() const { return freq_; }
	bool is_integer_valued() const { return integer_valued_; }
	std::size_t size() const { return values_.size(); }

private:
	std::vector<double> values_;
	Frequency freq_;
	bool integer_valued_;
};

// Series after the location shift y_t + max(1 - min_t y_t, 1); every entry is
// >= 1 and the shift is stored exactly so the inverse is bit-exact.
struct ShiftedSeries {
	std::vector<double> values;
	double shift = 0.0;
};

inline ShiftedSeries positivity_shift(const TimeSeries& series) {
	const auto& y = series.values();
	const double y_min = *std::min_element(y.begin(), y.end());
	const double shift = std::max(1.0 - y_min, 1.0);
	ShiftedSeries out;
	out.shift = shift;
	out.values.reserve(y.size());
	for (double v : y) {
		out.values.push_back(v + shift);
	}
	return out;
}

struct Horizon {
	int steps = 1;

	explicit Horizon(int h) : steps(h) {
		if (h < 1) {
			throw std::invalid_argument("Horizon: steps must be >= 1");
		}
	}
};

}  // namespace flair
