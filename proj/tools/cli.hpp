#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flair/flair.hpp"

namespace flair::cli {

constexpr int kSchemaVersion = 1;

inline nlohmann::json double_or_null(double v) {
	if (std::isfinite(v)) return v;
	return nullptr;
}

struct CommonOptions {
	std::string input;
	std::string format = "auto";
	int holdout = 0;
	std::string output;
	std::string config_path;
	int samples = 200;
	std::uint64_t seed = 0;
	unsigned threads = 0;
	std::string shape_variant = "frozen_k2";
};

inline CorpusFormat parse_format(const std::string& f) {
	if (f == "csv") return CorpusFormat::Csv;
	if (f == "jsonl") return CorpusFormat::JsonLines;
	return CorpusFormat::Auto;
}

// Experiments-only override of the internal constants; prints a loud banner
// because results under modified constants are non-canonical.
inline void apply_config_file(CascadeConfig& config, const std::string& path) {
	std::ifstream in(path);
	if (!in) {
		throw IngestError("cannot open config '" + path + "'");
	}
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw IngestError("config parse error: " + std::string(e.what()));
	}
	bool touched = false;
	auto load_int = [&](const char* key, int& slot) {
		if (j.contains(key)) {
			slot = j[key].get<int>();
			touched = true;
		}
	};
	load_int("shape_k", config.constants.shape_k);
	load_int("phase_noise_k", config.constants.phase_noise_k);
	load_int("min_complete", config.constants.min_complete);
	load_int("max_complete", config.constants.max_complete);
	load_int("min_positive_bc", config.constants.min_positive_bc);
	load_int("n_alphas", config.constants.n_alphas);
	if (j.contains("bc_exp_clip")) {
		config.constants.bc_exp_clip = j["bc_exp_clip"].get<double>();
		touched = true;
	}
	if (j.contains("pin_alpha")) {
		config.pin_alpha = j["pin_alpha"].get<double>();
		touched = true;
	}
	if (j.contains("gcv_temperature")) {
		const std::string mode = j["gcv_temperature"].get<std::string>();
		if (mode == "gcv_min") config.gcv_temperature = GcvTemperature::GcvMin;
		else if (mode == "median_gcv") config.gcv_temperature = GcvTemperature::MedianGcv;
		else if (mode == "argmin") config.gcv_temperature = GcvTemperature::ArgMin;
		else throw IngestError("config: unknown gcv_temperature '" + mode + "'");
		touched = true;
	}
	if (touched) {
		std::cerr << "*** NON-CANONICAL CONSTANTS IN EFFECT (" << path
		          << "): results are for experiments only ***\n";
	}
}

inline CascadeConfig build_config(const CommonOptions& opts) {
	CascadeConfig config;
	config.n_samples = opts.samples;
	config.seed = opts.seed;
	const auto variant = parse_shape_variant(opts.shape_variant);
	if (!variant) {
		throw CLI::ValidationError("--shape-variant", "unknown variant '" + opts.shape_variant + "'");
	}
	config.shape_variant = *variant;
	if (!opts.config_path.empty()) {
		apply_config_file(config, opts.config_path);
	}
	return config;
}

inline void write_text(const std::string& path, const std::string& body) {
	if (path.empty() || path == "-") {
		std::cout << body;
		return;
	}
	std::ofstream out(path);
	if (!out) {
		throw IngestError("cannot write '" + path + "'");
	}
	out << body;
}

// ---------------------------------------------------------------------------
// forecast

inline int cmd_forecast(const CommonOptions& opts, int horizon) {
	const Corpus corpus = ingest(opts.input, parse_format(opts.format), opts.holdout);
	const CascadeConfig base = build_config(opts);
	const std::vector<double> levels = decile_levels();

	std::vector<std::string> rows(corpus.entries.size());
	Rng seed_root(base.seed);
	parallel_for_indexed(
	    corpus.entries.size(),
	    [&](std::size_t i) {
		    const CorpusEntry& entry = corpus.entries[i];
		    CascadeConfig config = base;
		    config.seed = seed_root.fork(static_cast<std::uint64_t>(i)).seed();
		    const TimeSeries series(entry.train, entry.freq);
		    const ForecastResult result = forecast(series, Horizon(horizon), config);
		    const Eigen::MatrixXd q = quantiles(result, levels);

		    nlohmann::json row;
		    row["schema_version"] = kSchemaVersion;
		    row["id"] = entry.id;
		    row["branch"] = std::string(branch_name(result.branch));
		    row["point"] = result.point;
		    nlohmann::json qj;
		    for (std::size_t k = 0; k < levels.size(); ++k) {
			    std::ostringstream key;
			    key << levels[k];
			    std::vector<double> qrow(q.cols());
			    for (int h = 0; h < q.cols(); ++h) qrow[h] = q(static_cast<Eigen::Index>(k), h);
			    qj[key.str()] = qrow;
		    }
		    row["quantiles"] = qj;
		    nlohmann::json diag;
		    for (const auto& [key, value] : result.diagnostics) {
			    diag[key] = double_or_null(value);
		    }
		    row["diagnostics"] = diag;
		    rows[i] = row.dump();
	    },
	    opts.threads);

	std::ostringstream body;
	for (const auto& row : rows) body << row << "\n";
	write_text(opts.output, body.str());
	for (const auto& rejected : corpus.rejected) {
		std::cerr << "rejected series '" << rejected.id << "': " << rejected.reason << "\n";
	}
	return 0;
}

// ---------------------------------------------------------------------------
// diagnose

inline int cmd_diagnose(const CommonOptions& opts, const std::string& phase_csv) {
	const Corpus corpus = ingest(opts.input, parse_format(opts.format), opts.holdout);
	std::vector<std::string> rows(corpus.entries.size());
	std::vector<Diagnosis> diagnoses(corpus.entries.size());
	parallel_for_indexed(
	    corpus.entries.size(),
	    [&](std::size_t i) {
		    const CorpusEntry& entry = corpus.entries[i];
		    const TimeSeries series(entry.train, entry.freq);
		    const Diagnosis d = diagnose(series);
		    diagnoses[i] = d;
		    nlohmann::json row;
		    row["schema_version"] = kSchemaVersion;
		    row["id"] = entry.id;
		    row["p_star"] = d.p_star;
		    row["n_c"] = d.n_c;
		    row["r1_centered"] = double_or_null(d.r1_centered);
		    row["zero_fraction"] = d.zero_fraction;
		    row["bbp_second_spike_subcritical"] = d.bbp_second_spike_subcritical;
		    row["route"] = std::string(route_name(d.route));
		    row["reasons"] = d.reasons;
		    row["headline_regime"] = d.headline_regime;
		    rows[i] = row.dump();
	    },
	    opts.threads);

	std::ostringstream body;
	for (const auto& row : rows) body << row << "\n";
	write_text(opts.output, body.str());

	if (!phase_csv.empty()) {
		std::ostringstream csv;
		csv << "series_id,r1_centered,n_c,route,rel_mase\n";
		for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
			const Diagnosis& d = diagnoses[i];
			csv << corpus.entries[i].id << ",";
			if (std::isfinite(d.r1_centered)) csv << d.r1_centered;
			csv << "," << d.n_c << "," << route_name(d.route) << ",\n";
		}
		write_text(phase_csv, csv.str());
	}
	return 0;
}

// ---------------------------------------------------------------------------
// eval

inline nlohmann::json report_to_json(const MetricReport& report) {
	nlohmann::json j;
	j["schema_version"] = kSchemaVersion;
	j["n_included"] = report.n_included;
	j["n_excluded"] = report.n_excluded;
	j["rel_mase"] = double_or_null(report.rel_mase);
	j["rel_crps"] = double_or_null(report.rel_crps);
	j["rel_mase_ci"] = {{"lo", report.rel_mase_ci.lo},
	                    {"hi", report.rel_mase_ci.hi},
	                    {"b", report.rel_mase_ci.b},
	                    {"degenerate", report.rel_mase_ci.degenerate}};
	j["rel_crps_ci"] = {{"lo", report.rel_crps_ci.lo},
	                    {"hi", report.rel_crps_ci.hi},
	                    {"b", report.rel_crps_ci.b},
	                    {"degenerate", report.rel_crps_ci.degenerate}};
	nlohmann::json coverage;
	for (const auto& [level, value] : report.mean_coverage) {
		std::ostringstream key;
		key << level;
		coverage[key.str()] = value;
	}
	j["coverage"] = coverage;
	nlohmann::json per_config = nlohmann::json::array();
	for (const auto& row : report.per_config) {
		nlohmann::json r;
		r["id"] = row.id;
		r["family"] = row.family;
		r["excluded"] = row.excluded;
		if (row.excluded) {
			r["reason"] = row.exclusion_reason;
		} else {
			r["mase"] = double_or_null(row.mase_value);
			r["crps"] = double_or_null(row.crps_value);
			r["wql"] = double_or_null(row.wql_value);
			r["sn_mase"] = double_or_null(row.sn_mase);
			r["rel_mase"] = double_or_null(std::exp(row.log_ratio_mase));
			r["rel_crps"] = double_or_null(std::exp(row.log_ratio_crps));
			r["p_star"] = row.p_star;
			r["n_c"] = row.n_c;
			r["r1_centered"] = double_or_null(row.r1_centered);
			r["branch"] = std::string(branch_name(row.branch));
			nlohmann::json cov;
			for (const auto& [level, value] : row.coverage) {
				std::ostringstream key;
				key << level;
				cov[key.str()] = value;
			}
			r["coverage"] = cov;
		}
		per_config.push_back(std::move(r));
	}
	j["per_config"] = std::move(per_config);
	return j;
}

inline std::string report_to_text(const MetricReport& report) {
	std::ostringstream out;
	out << "configs included " << report.n_included << ", excluded " << report.n_excluded << "\n";
	char line[160];
	std::snprintf(line, sizeof(line), "relMASE %.4f  [%.4f, %.4f]\n", report.rel_mase,
	              report.rel_mase_ci.lo, report.rel_mase_ci.hi);
	out << line;
	std::snprintf(line, sizeof(line), "relCRPS %.4f  [%.4f, %.4f]\n", report.rel_crps,
	              report.rel_crps_ci.lo, report.rel_crps_ci.hi);
	out << line;
	for (const auto& [level, value] : report.mean_coverage) {
		std::snprintf(line, sizeof(line), "coverage %.0f%%: %.1f%%\n", 100.0 * level,
		              100.0 * value);
		out << line;
	}
	std::snprintf(line, sizeof(line), "%-24s %-10s %10s %10s %10s %6s %6s\n", "series", "branch",
	              "mase", "relMASE", "relCRPS", "P*", "n_c");
	out << line;
	for (const auto& row : report.per_config) {
		if (row.excluded) {
			std::snprintf(line, sizeof(line), "%-24s EXCLUDED: %s\n", row.id.c_str(),
			              row.exclusion_reason.c_str());
		} else {
			std::snprintf(line, sizeof(line), "%-24s %-10s %10.4f %10.4f %10.4f %6d %6d\n",
			              row.id.c_str(), std::string(branch_name(row.branch)).c_str(),
			              row.mase_value, std::exp(row.log_ratio_mase),
			              std::exp(row.log_ratio_crps), row.p_star, row.n_c);
		}
		out << line;
	}
	return out.str();
}

inline int cmd_eval(const CommonOptions& opts, const std::string& baseline, bool text,
                    const std::string& phase_csv, int bootstrap_b) {
	if (baseline != "seasonal-naive") {
		throw CLI::ValidationError("--baseline", "only 'seasonal-naive' is supported");
	}
	const Corpus corpus = ingest(opts.input, parse_format(opts.format), opts.holdout);
	const CascadeConfig config = build_config(opts);
	EvalOptions eval_options;
	eval_options.n_threads = opts.threads;
	eval_options.bootstrap_b = bootstrap_b;
	const MetricReport report = evaluate_corpus(corpus, config, eval_options);

	write_text(opts.output, text ? report_to_text(report) : report_to_json(report).dump(2) + "\n");

	if (!phase_csv.empty()) {
		std::ostringstream csv;
		csv << "series_id,r1_centered,n_c,route,rel_mase\n";
		for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
			const auto& row = report.per_config[i];
			const Diagnosis d = diagnose(TimeSeries(corpus.entries[i].train,
			                                        corpus.entries[i].freq));
			csv << row.id << ",";
			if (std::isfinite(d.r1_centered)) csv << d.r1_centered;
			csv << "," << d.n_c << "," << route_name(d.route) << ",";
			if (!row.excluded) csv << std::exp(row.log_ratio_mase);
			csv << "\n";
		}
		write_text(phase_csv, csv.str());
	}
	return 0;
}

// ---------------------------------------------------------------------------
// sweep

inline nlohmann::json sweep_to_json(const SweepReport& report) {
	nlohmann::json j;
	j["schema_version"] = kSchemaVersion;
	j["kind"] = std::string(sweep_kind_name(report.kind));
	j["n_configs"] = report.n_configs;
	nlohmann::json arms = nlohmann::json::array();
	for (const auto& arm : report.arms) {
		nlohmann::json a;
		a["name"] = arm.name;
		a["baseline"] = arm.is_baseline;
		a["rel_mase"] = double_or_null(arm.rel_mase);
		a["rel_crps"] = double_or_null(arm.rel_crps);
		a["median_mase"] = double_or_null(arm.median_mase);
		a["n_configs"] = arm.n_configs;
		a["n_failed"] = arm.n_failed;
		if (!arm.is_baseline) {
			a["delta_pct"] = double_or_null(arm.delta_pct);
			a["ci_lo"] = double_or_null(arm.ci.lo);
			a["ci_hi"] = double_or_null(arm.ci.hi);
			a["p_raw"] = double_or_null(arm.p_raw);
			a["p_holm"] = double_or_null(arm.p_holm);
			a["median_mase_ratio"] = double_or_null(arm.median_mase_ratio);
		}
		arms.push_back(std::move(a));
	}
	j["arms"] = std::move(arms);
	if (!report.coverage.empty()) {
		nlohmann::json cov;
		for (const auto& [level, value] : report.coverage) {
			std::ostringstream key;
			key << level;
			cov[key.str()] = value;
		}
		j["coverage"] = cov;
	}
	return j;
}

inline std::string sweep_to_csv(const SweepReport& report) {
	std::ostringstream out;
	out << "arm,baseline,rel_mase,rel_crps,median_mase,delta_pct,ci_lo,ci_hi,p_raw,p_holm,"
	       "median_mase_ratio,n_configs,n_failed\n";
	for (const auto& arm : report.arms) {
		out << arm.name << "," << (arm.is_baseline ? 1 : 0) << "," << arm.rel_mase << ","
		    << arm.rel_crps << "," << arm.median_mase << ",";
		if (arm.is_baseline) {
			out << ",,,,,";
		} else {
			out << arm.delta_pct << "," << arm.ci.lo << "," << arm.ci.hi << "," << arm.p_raw
			    << "," << arm.p_holm << "," << arm.median_mase_ratio;
		}
		out << "," << arm.n_configs << "," << arm.n_failed << "\n";
	}
	return out.str();
}

inline int cmd_sweep(const CommonOptions& opts, const std::string& kind_name,
                     const std::vector<int>& arms, const std::vector<int>& periods,
                     int bootstrap_b, int flips, const std::string& csv_path) {
	SweepKind kind;
	if (kind_name == "k") kind = SweepKind::KSweep;
	else if (kind_name == "shape-variant") kind = SweepKind::ShapeVariant;
	else if (kind_name == "period-misspec") kind = SweepKind::PeriodMisspec;
	else if (kind_name == "coverage") kind = SweepKind::Coverage;
	else throw CLI::ValidationError("--kind", "unknown sweep kind '" + kind_name + "'");
	for (int k : arms) {
		if (k < 0) throw CLI::ValidationError("--arms", "K values must be >= 0 (0 means n_c)");
	}
	for (int p : periods) {
		if (p < 1) throw CLI::ValidationError("--periods", "periods must be >= 1");
	}
	if (kind == SweepKind::PeriodMisspec && periods.empty()) {
		throw CLI::ValidationError("--periods", "period-misspec needs a period list");
	}

	const Corpus corpus = ingest(opts.input, parse_format(opts.format), opts.holdout);
	const CascadeConfig config = build_config(opts);
	SweepOptions options;
	options.bootstrap_b = bootstrap_b;
	options.sign_flips = flips;
	options.n_threads = opts.threads;
	if (!arms.empty()) options.k_arms = arms;
	if (!periods.empty()) options.period_arms = periods;

	const SweepReport report = run_sweep(kind, corpus, config, options);
	write_text(opts.output, sweep_to_json(report).dump(2) + "\n");
	if (!csv_path.empty()) {
		write_text(csv_path, sweep_to_csv(report));
	}
	return 0;
}

// ---------------------------------------------------------------------------
// generate

inline int cmd_generate(const std::string& spec_path, const std::string& out_path) {
	std::ifstream in(spec_path);
	if (!in) {
		throw IngestError("cannot open spec '" + spec_path + "'");
	}
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw IngestError("spec parse error: " + std::string(e.what()));
	}
	Lsr1GenSpec spec;
	if (j.contains("period")) spec.period = j["period"].get<int>();
	if (j.contains("n_cycles")) spec.n_cycles = j["n_cycles"].get<int>();
	if (j.contains("sigma")) spec.sigma = j["sigma"].get<double>();
	if (j.contains("level_kind")) spec.level_kind = parse_level_kind(j["level_kind"]);
	if (j.contains("shape_kind")) spec.shape_kind = parse_shape_kind(j["shape_kind"]);
	if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
	if (j.contains("n_series")) spec.n_series = j["n_series"].get<int>();
	if (j.contains("test_cycles")) spec.test_cycles = j["test_cycles"].get<int>();
	if (j.contains("family_size")) spec.family_size = j["family_size"].get<int>();

	const Corpus corpus = generate_lsr1(spec);
	std::ostringstream body;
	for (const auto& entry : corpus.entries) {
		nlohmann::json row;
		row["schema_version"] = kSchemaVersion;
		row["id"] = entry.id;
		row["freq"] = std::string(frequency_code(entry.freq));
		row["family"] = entry.family;
		row["train"] = entry.train;
		row["test"] = entry.test;
		body << row.dump() << "\n";
	}
	write_text(out_path, body.str());
	return 0;
}

// ---------------------------------------------------------------------------

inline void add_common(CLI::App* cmd, CommonOptions& opts, bool with_sampling = true) {
	cmd->add_option("--input", opts.input, "corpus file (CSV or JSONL)")->required();
	cmd->add_option("--format", opts.format, "input format: auto|csv|jsonl")
	    ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
	cmd->add_option("--holdout", opts.holdout,
	                "split this many trailing points into the test window")
	    ->check(CLI::NonNegativeNumber);
	cmd->add_option("--output", opts.output, "output path (default stdout)");
	cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
	cmd->add_option("--config", opts.config_path,
	                "JSON file pinning internal constants (experiments only)");
	if (with_sampling) {
		cmd->add_option("--samples", opts.samples, "predictive sample paths")
		    ->check(CLI::PositiveNumber);
		cmd->add_option("--seed", opts.seed, "RNG seed");
		cmd->add_option("--shape-variant", opts.shape_variant,
		                "shape estimator (harness only): frozen_k2|ewma|fourier1|savgol|"
		                "js_uniform|js_harmonic|pooled_mle|rank2|rank3");
	}
}

inline int run_cli(int argc, const char* const* argv) {
	CLI::App app{"FLAIR periodic forecaster: rank-1 Level x Shape factorization with "
	             "BIC period selection and GCV-averaged Ridge"};
	app.require_subcommand(1);

	CommonOptions forecast_opts;
	int horizon = 0;
	auto* forecast_cmd = app.add_subcommand("forecast", "forecast each series in a corpus");
	add_common(forecast_cmd, forecast_opts);
	forecast_cmd->add_option("--horizon", horizon, "forecast steps")
	    ->required()
	    ->check(CLI::PositiveNumber);

	CommonOptions diagnose_opts;
	std::string diagnose_phase_csv;
	auto* diagnose_cmd =
	    app.add_subcommand("diagnose", "training-window routing diagnostics per series");
	add_common(diagnose_cmd, diagnose_opts, false);
	diagnose_cmd->add_option("--phase-csv", diagnose_phase_csv,
	                         "write an (r1, n_c, route) phase-diagram CSV");

	CommonOptions eval_opts;
	std::string baseline = "seasonal-naive";
	bool eval_text = false;
	std::string eval_phase_csv;
	int eval_b = 10000;
	auto* eval_cmd = app.add_subcommand("eval", "metric report against Seasonal Naive");
	add_common(eval_cmd, eval_opts);
	eval_cmd->add_option("--baseline", baseline, "relative-metric baseline");
	eval_cmd->add_flag("--text", eval_text, "aligned-column text instead of JSON");
	eval_cmd->add_option("--phase-csv", eval_phase_csv, "phase-diagram CSV with relMASE");
	eval_cmd->add_option("--bootstrap-b", eval_b, "bootstrap replications");

	CommonOptions sweep_opts;
	std::string sweep_kind;
	std::vector<int> sweep_arms;
	std::vector<int> sweep_periods;
	int sweep_b = 10000;
	int sweep_flips = 10000;
	std::string sweep_csv;
	auto* sweep_cmd = app.add_subcommand("sweep", "ablation sweeps over the corpus");
	add_common(sweep_cmd, sweep_opts);
	sweep_cmd->add_option("--kind", sweep_kind, "k|shape-variant|period-misspec|coverage")
	    ->required();
	sweep_cmd->add_option("--arms", sweep_arms, "K values for the k sweep (0 = n_c)");
	sweep_cmd->add_option("--periods", sweep_periods,
	                      "forced periods for period-misspec (first = true period)");
	sweep_cmd->add_option("--bootstrap-b", sweep_b, "bootstrap replications");
	sweep_cmd->add_option("--flips", sweep_flips, "sign-flip permutations");
	sweep_cmd->add_option("--csv", sweep_csv, "also write the sweep table as CSV");

	std::string gen_spec;
	std::string gen_out;
	auto* gen_cmd = app.add_subcommand("generate", "write a synthetic LSR1 corpus");
	gen_cmd->add_option("--spec", gen_spec, "generator spec JSON")->required();
	gen_cmd->add_option("--out", gen_out, "output corpus path")->required();

	try {
		app.parse(argc, argv);
		if (forecast_cmd->parsed()) return cmd_forecast(forecast_opts, horizon);
		if (diagnose_cmd->parsed()) return cmd_diagnose(diagnose_opts, diagnose_phase_csv);
		if (eval_cmd->parsed()) {
			return cmd_eval(eval_opts, baseline, eval_text, eval_phase_csv, eval_b);
		}
		if (sweep_cmd->parsed()) {
			return cmd_sweep(sweep_opts, sweep_kind, sweep_arms, sweep_periods, sweep_b,
			                 sweep_flips, sweep_csv);
		}
		if (gen_cmd->parsed()) return cmd_generate(gen_spec, gen_out);
		return 1;
	} catch (const CLI::ParseError& e) {
		return app.exit(e) == 0 ? 0 : 1;
	} catch (const IngestError& e) {
		std::cerr << "data error: " << e.what() << "\n";
		return 2;
	} catch (const std::exception& e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return 3;
	}
}

}  // namespace flair::cli
