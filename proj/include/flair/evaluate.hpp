#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flair/cascade.hpp"
#include "flair/corpus.hpp"
#include "flair/metrics.hpp"
#include "flair/parallel.hpp"
#include "flair/stats.hpp"

namespace flair {

inline std::vector<double> decile_levels() {
	return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

struct EvalOptions {
	std::vector<double> wql_levels = decile_levels();
	std::vector<double> coverage_levels = {0.5, 0.8, 0.9, 0.95};
	unsigned n_threads = 0;
	int bootstrap_b = 10000;
	// Fixed MASE scaling lag; used by the period-misspecification sweep so
	// that all arms share the true-period denominator.
	std::optional<int> mase_scale_m;
};

struct ConfigMetrics {
	std::string id;
	std::string family;
	bool excluded = false;
	std::string exclusion_reason;

	double mase_value = 0.0;
	double crps_value = 0.0;
	double wql_value = 0.0;
	double sn_mase = 0.0;
	double sn_crps = 0.0;
	double log_ratio_mase = 0.0;
	double log_ratio_crps = 0.0;
	std::map<double, double> coverage;

	int p_star = 1;
	int n_c = 0;
	double r1_centered = std::numeric_limits<double>::quiet_NaN();
	Branch branch = Branch::Rank1;
};

struct MetricReport {
	std::vector<ConfigMetrics> per_config;
	int n_included = 0;
	int n_excluded = 0;
	double rel_mase = 1.0;
	double rel_crps = 1.0;
	BootstrapCI rel_mase_ci;
	BootstrapCI rel_crps_ci;
	std::map<double, double> mean_coverage;
};

namespace detail {

inline double clamp_positive(double v) { return std::max(v, 1e-12); }

inline ConfigMetrics evaluate_entry(const CorpusEntry& entry, const CascadeConfig& base_config,
                                    const EvalOptions& options, std::uint64_t per_config_seed) {
	ConfigMetrics out;
	out.id = entry.id;
	out.family = entry.family.empty() ? entry.id : entry.family;
	if (entry.test.empty()) {
		out.excluded = true;
		out.exclusion_reason = "no test window";
		return out;
	}
	try {
		const TimeSeries series(entry.train, entry.freq);
		const int horizon = static_cast<int>(entry.test.size());
		CascadeConfig config = base_config;
		config.seed = per_config_seed;
		const ForecastResult result = forecast(series, Horizon(horizon), config);

		out.p_star = static_cast<int>(result.diagnostics.count("P_star")
		                                  ? result.diagnostics.at("P_star")
		                                  : 1.0);
		if (result.diagnostics.count("n_c")) {
			out.n_c = static_cast<int>(result.diagnostics.at("n_c"));
		}
		if (result.diagnostics.count("r1_centered")) {
			out.r1_centered = result.diagnostics.at("r1_centered");
		}
		out.branch = result.branch;

		const int m = options.mase_scale_m.value_or(out.p_star >= 2 ? out.p_star : 1);
		if (entry.train.size() <= static_cast<std::size_t>(m)) {
			out.excluded = true;
			out.exclusion_reason = "train shorter than scaling lag";
			return out;
		}
		const auto mase_flair = mase(entry.test, result.point, entry.train, m);
		const std::vector<double> sn = seasonal_naive(entry.train, out.p_star, horizon);
		const auto mase_sn = mase(entry.test, sn, entry.train, m);
		if (!mase_flair || !mase_sn || !(*mase_sn > 0.0)) {
			out.excluded = true;
			out.exclusion_reason = "degenerate MASE scaling";
			return out;
		}
		out.mase_value = *mase_flair;
		out.sn_mase = *mase_sn;
		out.log_ratio_mase = std::log(clamp_positive(out.mase_value) / *mase_sn);

		double crps_sum = 0.0;
		double sn_abs = 0.0;
		std::vector<double> column(result.samples.rows());
		for (int h = 0; h < horizon; ++h) {
			for (int i = 0; i < result.samples.rows(); ++i) column[i] = result.samples(i, h);
			crps_sum += sample_crps(entry.test[h], column);
			sn_abs += std::abs(sn[h] - entry.test[h]);
		}
		out.crps_value = crps_sum / horizon;
		out.sn_crps = sn_abs / horizon;  // CRPS of a point forecast is its MAE
		if (!(out.sn_crps > 0.0)) {
			out.excluded = true;
			out.exclusion_reason = "degenerate Seasonal Naive CRPS";
			return out;
		}
		out.log_ratio_crps = std::log(clamp_positive(out.crps_value) / out.sn_crps);

		const Eigen::MatrixXd deciles = quantiles(result, options.wql_levels);
		const auto wql_value = wql(entry.test, deciles, options.wql_levels);
		out.wql_value = wql_value.value_or(std::numeric_limits<double>::quiet_NaN());

		for (double gamma : options.coverage_levels) {
			const double tail = (1.0 - gamma) / 2.0;
			const std::vector<double> bounds = {tail, 1.0 - tail};
			const Eigen::MatrixXd q = quantiles(result, bounds);
			std::vector<double> lo(horizon);
			std::vector<double> hi(horizon);
			for (int h = 0; h < horizon; ++h) {
				lo[h] = q(0, h);
				hi[h] = q(1, h);
			}
			out.coverage[gamma] = interval_coverage(entry.test, lo, hi);
		}
	} catch (const std::exception& e) {
		out.excluded = true;
		out.exclusion_reason = e.what();
	}
	return out;
}

}  // namespace detail

// Per-config metrics plus geometric-mean relatives against Seasonal Naive,
// with grouped paired-bootstrap intervals at the family level.
inline MetricReport evaluate_corpus(const Corpus& corpus, const CascadeConfig& config,
                                    const EvalOptions& options = {}) {
	MetricReport report;
	report.per_config.resize(corpus.entries.size());
	Rng seed_root(config.seed);
	std::vector<std::uint64_t> seeds(corpus.entries.size());
	for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
		seeds[i] = seed_root.fork(static_cast<std::uint64_t>(i)).seed();
	}
	parallel_for_indexed(
	    corpus.entries.size(),
	    [&](std::size_t i) {
		    report.per_config[i] =
		        detail::evaluate_entry(corpus.entries[i], config, options, seeds[i]);
	    },
	    options.n_threads);

	std::vector<double> log_mase;
	std::vector<double> log_crps;
	std::vector<std::string> families;
	std::map<double, double> coverage_sums;
	for (const auto& row : report.per_config) {
		if (row.excluded) {
			++report.n_excluded;
			continue;
		}
		++report.n_included;
		log_mase.push_back(row.log_ratio_mase);
		log_crps.push_back(row.log_ratio_crps);
		families.push_back(row.family);
		for (const auto& [level, value] : row.coverage) {
			coverage_sums[level] += value;
		}
	}
	if (report.n_included > 0) {
		report.rel_mase = geomean_from_logs(log_mase);
		report.rel_crps = geomean_from_logs(log_crps);
		report.rel_mase_ci =
		    grouped_paired_bootstrap(log_mase, families, options.bootstrap_b, config.seed);
		report.rel_crps_ci =
		    grouped_paired_bootstrap(log_crps, families, options.bootstrap_b, config.seed + 1);
		for (auto& [level, sum] : coverage_sums) {
			report.mean_coverage[level] = sum / report.n_included;
		}
	}
	return report;
}

enum class SweepKind { KSweep, ShapeVariant, PeriodMisspec, Coverage };

inline std::string_view sweep_kind_name(SweepKind k) {
	switch (k) {
		case SweepKind::KSweep: return "k";
		case SweepKind::ShapeVariant: return "shape-variant";
		case SweepKind::PeriodMisspec: return "period-misspec";
		case SweepKind::Coverage: return "coverage";
	}
	return "k";
}

struct SweepOptions {
	std::vector<int> k_arms = {2, 1, 4, 5, 10, 0};  // 0 means K = n_c; first arm is baseline
	std::vector<int> period_arms;                   // first arm is the true period
	int bootstrap_b = 10000;
	int sign_flips = 10000;
	unsigned n_threads = 0;
	EvalOptions eval;
};

struct SweepArmResult {
	std::string name;
	double rel_mase = std::numeric_limits<double>::quiet_NaN();
	double rel_crps = std::numeric_limits<double>::quiet_NaN();
	double median_mase = std::numeric_limits<double>::quiet_NaN();
	bool is_baseline = false;
	// Paired statistics vs the baseline arm (log MASE ratio scale).
	double delta_pct = 0.0;
	BootstrapCI ci;
	double p_raw = 1.0;
	double p_holm = 1.0;
	double median_mase_ratio = std::numeric_limits<double>::quiet_NaN();
	int n_configs = 0;
	int n_failed = 0;
};

struct SweepReport {
	SweepKind kind = SweepKind::KSweep;
	std::vector<SweepArmResult> arms;
	std::map<double, double> coverage;  // Coverage sweep only
	int n_configs = 0;
};

namespace detail {

inline double median_of(std::vector<double> v) {
	if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
	std::sort(v.begin(), v.end());
	const std::size_t mid = v.size() / 2;
	if (v.size() % 2 == 1) return v[mid];
	return 0.5 * (v[mid - 1] + v[mid]);
}

struct ArmEval {
	std::string name;
	MetricReport report;
};

}  // namespace detail

// Ablation sweeps. Arms share per-config seeds so paired comparisons cancel
// the sampling noise; failures are recorded per config and never abort.
inline SweepReport run_sweep(SweepKind kind, const Corpus& corpus, const CascadeConfig& base,
                             const SweepOptions& options = {}) {
	SweepReport report;
	report.kind = kind;
	report.n_configs = static_cast<int>(corpus.entries.size());

	EvalOptions eval_options = options.eval;
	eval_options.n_threads = options.n_threads;
	eval_options.bootstrap_b = options.bootstrap_b;

	if (kind == SweepKind::Coverage) {
		const MetricReport r = evaluate_corpus(corpus, base, eval_options);
		report.coverage = r.mean_coverage;
		SweepArmResult arm;
		arm.name = "flair";
		arm.is_baseline = true;
		arm.rel_mase = r.rel_mase;
		arm.rel_crps = r.rel_crps;
		arm.n_configs = r.n_included;
		arm.n_failed = r.n_excluded;
		report.arms.push_back(std::move(arm));
		return report;
	}

	std::vector<detail::ArmEval> evals;
	if (kind == SweepKind::KSweep) {
		for (int k : options.k_arms) {
			CascadeConfig config = base;
			config.shape_k_override = k;
			const std::string name = (k == 0) ? "K=n_c" : "K=" + std::to_string(k);
			evals.push_back({name, evaluate_corpus(corpus, config, eval_options)});
		}
	} else if (kind == SweepKind::ShapeVariant) {
		const ShapeVariant variants[] = {
		    ShapeVariant::FrozenK2,   ShapeVariant::Ewma,       ShapeVariant::FourierJ1,
		    ShapeVariant::SavitzkyGolay, ShapeVariant::JsUniform, ShapeVariant::JsHarmonic,
		    ShapeVariant::PooledMle,  ShapeVariant::Rank2Svd,   ShapeVariant::Rank3Svd};
		for (ShapeVariant v : variants) {
			CascadeConfig config = base;
			config.shape_variant = v;
			evals.push_back({std::string(shape_variant_name(v)),
			                 evaluate_corpus(corpus, config, eval_options)});
		}
	} else {  // PeriodMisspec
		std::vector<int> periods = options.period_arms;
		if (periods.empty()) {
			throw std::invalid_argument("run_sweep: period-misspec needs a period arm list");
		}
		// All arms share the true-period MASE scaling; otherwise the forced
		// period would change the denominator and mask the damage.
		eval_options.mase_scale_m = std::max(periods.front(), 1);
		for (int p : periods) {
			CascadeConfig config = base;
			config.period_override = p;
			evals.push_back({"P=" + std::to_string(p), evaluate_corpus(corpus, config, eval_options)});
		}
	}

	const MetricReport& base_report = evals.front().report;
	std::vector<double> p_raws;
	for (std::size_t a = 0; a < evals.size(); ++a) {
		SweepArmResult arm;
		arm.name = evals[a].name;
		arm.is_baseline = (a == 0);
		const MetricReport& r = evals[a].report;
		arm.rel_mase = r.rel_mase;
		arm.rel_crps = r.rel_crps;
		arm.n_configs = r.n_included;
		arm.n_failed = r.n_excluded;

		std::vector<double> mase_values;
		std::vector<double> log_ratios;
		std::vector<std::string> families;
		for (std::size_t i = 0; i < r.per_config.size(); ++i) {
			const auto& row = r.per_config[i];
			const auto& base_row = base_report.per_config[i];
			if (row.excluded || base_row.excluded) continue;
			mase_values.push_back(row.mase_value);
			log_ratios.push_back(std::log(detail::clamp_positive(row.mase_value) /
			                              detail::clamp_positive(base_row.mase_value)));
			families.push_back(row.family);
		}
		arm.median_mase = detail::median_of(mase_values);
		if (!arm.is_baseline && !log_ratios.empty()) {
			arm.delta_pct =
			    100.0 * (std::accumulate(log_ratios.begin(), log_ratios.end(), 0.0) /
			             static_cast<double>(log_ratios.size()));
			arm.ci = grouped_paired_bootstrap(log_ratios, families, options.bootstrap_b,
			                                  base.seed + 17 * a);
			arm.p_raw = sign_flip_pvalue(log_ratios, options.sign_flips, base.seed + 31 * a);
			p_raws.push_back(arm.p_raw);
			std::vector<double> base_mases;
			for (std::size_t i = 0; i < r.per_config.size(); ++i) {
				if (r.per_config[i].excluded || base_report.per_config[i].excluded) continue;
				base_mases.push_back(base_report.per_config[i].mase_value);
			}
			arm.median_mase_ratio = arm.median_mase / detail::median_of(base_mases);
		}
		report.arms.push_back(std::move(arm));
	}

	const std::vector<double> adjusted = holm_adjust(p_raws);
	std::size_t idx = 0;
	for (auto& arm : report.arms) {
		if (!arm.is_baseline) {
			arm.p_holm = adjusted[idx++];
		}
	}
	return report;
}

}  // namespace flair
