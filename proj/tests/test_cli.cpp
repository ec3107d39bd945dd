#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tools/cli.hpp"

using namespace flair;

namespace {

namespace fs = std::filesystem;

int run(const std::vector<std::string>& args) {
	std::vector<const char*> argv;
	argv.push_back("flair");
	for (const auto& a : args) argv.push_back(a.c_str());
	return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
	std::ifstream in(p);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

struct TempDir {
	fs::path path;
	TempDir() {
		path = fs::temp_directory_path() / "flair_cli_test";
		fs::create_directories(path);
	}
	~TempDir() {
		std::error_code ec;
		fs::remove_all(path, ec);
	}
};

void write_gen_spec(const fs::path& p, int n_series, int n_cycles, double sigma) {
	std::ofstream out(p);
	out << R"({"period":24,"n_cycles":)" << n_cycles << R"(,"sigma":)" << sigma
	    << R"(,"level_kind":"random_walk","shape_kind":"peaked2to1","seed":3,"n_series":)"
	    << n_series << R"(,"test_cycles":1,"family_size":3})";
}

}  // namespace

TEST_CASE("generate then forecast then eval round-trips through files") {
	TempDir tmp;
	const auto spec = tmp.path / "spec.json";
	const auto corpus = tmp.path / "corpus.jsonl";
	write_gen_spec(spec, 6, 30, 0.4);

	REQUIRE(run({"generate", "--spec", spec.string(), "--out", corpus.string()}) == 0);
	REQUIRE(fs::exists(corpus));

	const auto fcst = tmp.path / "fcst.jsonl";
	REQUIRE(run({"forecast", "--input", corpus.string(), "--horizon", "24", "--samples", "20",
	             "--seed", "7", "--output", fcst.string()}) == 0);
	const std::string first_run = slurp(fcst);
	REQUIRE(first_run.find("\"point\"") != std::string::npos);
	REQUIRE(first_run.find("\"0.5\"") != std::string::npos);

	// Byte-identical re-run under the same seed.
	const auto fcst2 = tmp.path / "fcst2.jsonl";
	REQUIRE(run({"forecast", "--input", corpus.string(), "--horizon", "24", "--samples", "20",
	             "--seed", "7", "--output", fcst2.string()}) == 0);
	REQUIRE(first_run == slurp(fcst2));

	const auto report = tmp.path / "report.json";
	const auto phase = tmp.path / "phase_eval.csv";
	REQUIRE(run({"eval", "--input", corpus.string(), "--baseline", "seasonal-naive", "--samples",
	             "30", "--bootstrap-b", "300", "--output", report.string(), "--phase-csv",
	             phase.string()}) == 0);
	const auto parsed = nlohmann::json::parse(slurp(report));
	REQUIRE(parsed["schema_version"] == 1);
	REQUIRE(parsed["n_included"].get<int>() == 6);
	REQUIRE(parsed["rel_mase"].get<double>() < 1.0);  // beats Seasonal Naive on mild noise
	const std::string phase_body = slurp(phase);
	REQUIRE(phase_body.rfind("series_id,r1_centered,n_c,route,rel_mase", 0) == 0);
	// One data row per series, each carrying a route tag.
	REQUIRE(std::count(phase_body.begin(), phase_body.end(), '\n') == 7);
	REQUIRE(std::count(phase_body.begin(), phase_body.end(), ',') == 4 * 7);
}

TEST_CASE("diagnose emits rows and the phase-diagram csv") {
	TempDir tmp;
	const auto spec = tmp.path / "spec.json";
	const auto corpus = tmp.path / "corpus.jsonl";
	write_gen_spec(spec, 3, 20, 0.3);
	REQUIRE(run({"generate", "--spec", spec.string(), "--out", corpus.string()}) == 0);

	const auto rows = tmp.path / "diag.jsonl";
	const auto phase = tmp.path / "phase.csv";
	REQUIRE(run({"diagnose", "--input", corpus.string(), "--output", rows.string(),
	             "--phase-csv", phase.string()}) == 0);
	const std::string body = slurp(rows);
	REQUIRE(body.find("\"route\"") != std::string::npos);
	const std::string csv = slurp(phase);
	REQUIRE(csv.rfind("series_id,r1_centered,n_c,route,rel_mase", 0) == 0);
}

TEST_CASE("sweep command writes json and csv tables") {
	TempDir tmp;
	const auto spec = tmp.path / "spec.json";
	const auto corpus = tmp.path / "corpus.jsonl";
	write_gen_spec(spec, 6, 30, 0.4);
	REQUIRE(run({"generate", "--spec", spec.string(), "--out", corpus.string()}) == 0);

	const auto out = tmp.path / "sweep.json";
	const auto csv = tmp.path / "sweep.csv";
	REQUIRE(run({"sweep", "--kind", "k", "--arms", "2", "--arms", "1", "--input",
	             corpus.string(), "--samples", "8", "--bootstrap-b", "200", "--flips", "200",
	             "--output", out.string(), "--csv", csv.string()}) == 0);
	const auto parsed = nlohmann::json::parse(slurp(out));
	REQUIRE(parsed["kind"] == "k");
	REQUIRE(parsed["arms"].size() == 2);
	REQUIRE(slurp(csv).rfind("arm,baseline", 0) == 0);
}

TEST_CASE("usage errors exit with code 1") {
	TempDir tmp;
	const auto spec = tmp.path / "spec.json";
	const auto corpus = tmp.path / "corpus.jsonl";
	write_gen_spec(spec, 1, 10, 0.1);
	REQUIRE(run({"generate", "--spec", spec.string(), "--out", corpus.string()}) == 0);

	SECTION("horizon 0 is rejected") {
		REQUIRE(run({"forecast", "--input", corpus.string(), "--horizon", "0"}) == 1);
	}
	SECTION("unknown subcommand") {
		REQUIRE(run({"frobnicate"}) == 1);
	}
	SECTION("unknown sweep kind") {
		REQUIRE(run({"sweep", "--kind", "nope", "--input", corpus.string()}) == 1);
	}
	SECTION("unknown baseline") {
		REQUIRE(run({"eval", "--input", corpus.string(), "--baseline", "arima"}) == 1);
	}
}

TEST_CASE("data errors exit with code 2") {
	REQUIRE(run({"forecast", "--input", "/nonexistent.jsonl", "--horizon", "3"}) == 2);
	REQUIRE(run({"generate", "--spec", "/nonexistent.json", "--out", "/tmp/x.jsonl"}) == 2);
}

TEST_CASE("config file overrides constants with a banner") {
	TempDir tmp;
	const auto spec = tmp.path / "spec.json";
	const auto corpus = tmp.path / "corpus.jsonl";
	write_gen_spec(spec, 2, 20, 0.3);
	REQUIRE(run({"generate", "--spec", spec.string(), "--out", corpus.string()}) == 0);

	const auto config = tmp.path / "config.json";
	{
		std::ofstream out(config);
		out << R"({"shape_k": 3, "gcv_temperature": "median_gcv"})";
	}
	const auto fcst = tmp.path / "fcst.jsonl";
	REQUIRE(run({"forecast", "--input", corpus.string(), "--horizon", "6", "--samples", "5",
	             "--config", config.string(), "--output", fcst.string()}) == 0);
	REQUIRE(slurp(fcst).find("\"point\"") != std::string::npos);
}
