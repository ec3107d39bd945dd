// Minimal end-to-end walkthrough: build a noisy hourly series with a daily
// profile, forecast two days ahead, and print the point path with an 80%
// interval next to the routing diagnosis.

#include <cstdio>
#include <vector>

#include "flair/cascade.hpp"
#include "flair/diagnostics.hpp"
#include "flair/rng.hpp"

int main() {
	flair::Rng rng(42);
	std::vector<double> y;
	double level = 120.0;
	for (int day = 0; day < 60; ++day) {
		level = std::max(level + 5.0 * rng.normal(), 20.0);
		for (int hour = 0; hour < 24; ++hour) {
			const double profile = (hour >= 8 && hour < 20) ? 2.0 : 1.0;
			y.push_back(level * profile / 36.0 + 0.2 * rng.normal());
		}
	}

	const flair::TimeSeries series(y, flair::Frequency::Hourly);

	const flair::Diagnosis diagnosis = flair::diagnose(series);
	std::printf("route=%s  P*=%d  n_c=%d  centered r1=%.3f\n",
	            std::string(flair::route_name(diagnosis.route)).c_str(), diagnosis.p_star,
	            diagnosis.n_c, diagnosis.r1_centered);

	flair::CascadeConfig config;
	config.seed = 7;
	const auto result = flair::forecast(series, flair::Horizon(48), config);
	const std::vector<double> levels = {0.1, 0.9};
	const auto interval = flair::quantiles(result, levels);

	std::printf("branch=%s\n", std::string(flair::branch_name(result.branch)).c_str());
	for (int h = 0; h < 48; h += 6) {
		std::printf("h=%2d  point=%8.3f  80%% interval [%8.3f, %8.3f]\n", h + 1,
		            result.point[h], interval(0, h), interval(1, h));
	}
	return 0;
}
