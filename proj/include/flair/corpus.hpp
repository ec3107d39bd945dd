#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flair/series.hpp"

namespace flair {

struct CorpusEntry {
	std::string id;
	std::string family;
	Frequency freq = Frequency::Unknown;
	std::vector<double> train;
	std::vector<double> test;
};

struct RejectedSeries {
	std::string id;
	std::string reason;
};

struct Corpus {
	std::vector<CorpusEntry> entries;
	std::string source;
	std::vector<RejectedSeries> rejected;
};

enum class CorpusFormat { Auto, Csv, JsonLines };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
	std::vector<std::string> out;
	std::string field;
	std::stringstream ss(line);
	while (std::getline(ss, field, ',')) {
		out.push_back(field);
	}
	if (!line.empty() && line.back() == ',') {
		out.emplace_back();
	}
	return out;
}

inline double parse_double(const std::string& field, int line_no) {
	double value = 0.0;
	const char* begin = field.data();
	const char* end = begin + field.size();
	auto [ptr, ec] = std::from_chars(begin, end, value);
	if (ec != std::errc() || ptr != end) {
		throw IngestError("line " + std::to_string(line_no) + ": malformed number '" + field + "'");
	}
	return value;
}

// Validate one assembled series; non-finite values reject the series (not
// the whole file) and are reported.
inline void finish_entry(Corpus& corpus, CorpusEntry entry, int holdout) {
	for (double v : entry.train) {
		if (!std::isfinite(v)) {
			corpus.rejected.push_back({entry.id, "non-finite value"});
			return;
		}
	}
	if (holdout > 0) {
		if (static_cast<int>(entry.train.size()) <= holdout) {
			corpus.rejected.push_back({entry.id, "shorter than holdout"});
			return;
		}
		entry.test.assign(entry.train.end() - holdout, entry.train.end());
		entry.train.resize(entry.train.size() - holdout);
	}
	if (entry.train.empty()) {
		corpus.rejected.push_back({entry.id, "empty training window"});
		return;
	}
	corpus.entries.push_back(std::move(entry));
}

inline Corpus ingest_csv(std::istream& in, int holdout) {
	Corpus corpus;
	std::string line;
	int line_no = 0;

	if (!std::getline(in, line)) {
		throw IngestError("line 1: empty file");
	}
	++line_no;
	if (!line.empty() && line.back() == '\r') line.pop_back();
	const auto header = split_csv_line(line);
	int col_id = -1, col_value = -1, col_family = -1, col_freq = -1;
	for (std::size_t c = 0; c < header.size(); ++c) {
		if (header[c] == "series_id" || header[c] == "id") col_id = static_cast<int>(c);
		else if (header[c] == "value") col_value = static_cast<int>(c);
		else if (header[c] == "family") col_family = static_cast<int>(c);
		else if (header[c] == "freq") col_freq = static_cast<int>(c);
	}
	if (col_id < 0 || col_value < 0) {
		throw IngestError("line 1: header must name series_id and value columns");
	}

	std::vector<std::string> id_order;
	std::map<std::string, CorpusEntry> building;
	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') line.pop_back();
		if (line.empty()) continue;
		const auto fields = split_csv_line(line);
		if (static_cast<int>(fields.size()) <= std::max(col_id, col_value)) {
			throw IngestError("line " + std::to_string(line_no) + ": too few columns");
		}
		const std::string& id = fields[col_id];
		auto it = building.find(id);
		if (it == building.end()) {
			CorpusEntry entry;
			entry.id = id;
			if (col_family >= 0 && col_family < static_cast<int>(fields.size())) {
				entry.family = fields[col_family];
			}
			if (col_freq >= 0 && col_freq < static_cast<int>(fields.size())) {
				entry.freq = parse_frequency(fields[col_freq]);
			}
			it = building.emplace(id, std::move(entry)).first;
			id_order.push_back(id);
		}
		// Values may be nan/inf textually; from_chars rejects them, so probe first.
		const std::string& raw = fields[col_value];
		if (raw == "nan" || raw == "NaN" || raw == "inf" || raw == "-inf") {
			it->second.train.push_back(std::numeric_limits<double>::quiet_NaN());
		} else {
			it->second.train.push_back(parse_double(raw, line_no));
		}
	}
	for (const auto& id : id_order) {
		finish_entry(corpus, std::move(building[id]), holdout);
	}
	return corpus;
}

inline std::vector<double> json_array_to_values(const nlohmann::json& arr, int line_no) {
	if (!arr.is_array()) {
		throw IngestError("line " + std::to_string(line_no) + ": expected an array of numbers");
	}
	std::vector<double> out;
	out.reserve(arr.size());
	for (const auto& v : arr) {
		if (v.is_null()) {
			out.push_back(std::numeric_limits<double>::quiet_NaN());
		} else if (v.is_number()) {
			out.push_back(v.get<double>());
		} else {
			throw IngestError("line " + std::to_string(line_no) + ": non-numeric array entry");
		}
	}
	return out;
}

inline Corpus ingest_jsonl(std::istream& in, int holdout) {
	Corpus corpus;
	std::string line;
	int line_no = 0;
	std::set<std::string> seen;
	while (std::getline(in, line)) {
		++line_no;
		if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
		nlohmann::json row;
		try {
			row = nlohmann::json::parse(line);
		} catch (const nlohmann::json::exception& e) {
			throw IngestError("line " + std::to_string(line_no) + ": " + e.what());
		}
		CorpusEntry entry;
		if (!row.contains("id") || !row["id"].is_string()) {
			throw IngestError("line " + std::to_string(line_no) + ": missing string 'id'");
		}
		entry.id = row["id"].get<std::string>();
		if (!seen.insert(entry.id).second) {
			throw IngestError("line " + std::to_string(line_no) + ": duplicated series_id '" +
			                  entry.id + "'");
		}
		entry.freq = row.contains("freq") ? parse_frequency(row["freq"].get<std::string>())
		                                  : Frequency::Unknown;
		if (row.contains("family")) entry.family = row["family"].get<std::string>();
		if (!row.contains("train")) {
			throw IngestError("line " + std::to_string(line_no) + ": missing 'train' array");
		}
		entry.train = json_array_to_values(row["train"], line_no);
		if (row.contains("test")) {
			entry.test = json_array_to_values(row["test"], line_no);
			for (double v : entry.test) {
				if (!std::isfinite(v)) {
					corpus.rejected.push_back({entry.id, "non-finite test value"});
					entry.test.clear();
					break;
				}
			}
		}
		finish_entry(corpus, std::move(entry), entry.test.empty() ? holdout : 0);
	}
	return corpus;
}

}  // namespace detail

// Load a corpus from long CSV (columns: series_id, timestamp-or-index, value,
// optional family/freq) or JSON-lines (one object per series). `holdout`
// splits that many trailing points into the test window when the file does
// not carry one.
inline Corpus ingest(const std::string& path, CorpusFormat format = CorpusFormat::Auto,
                     int holdout = 0) {
	std::ifstream in(path);
	if (!in) {
		throw IngestError("cannot open '" + path + "'");
	}
	if (format == CorpusFormat::Auto) {
		if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
			format = CorpusFormat::Csv;
		} else {
			format = CorpusFormat::JsonLines;
		}
	}
	Corpus corpus = (format == CorpusFormat::Csv) ? detail::ingest_csv(in, holdout)
	                                              : detail::ingest_jsonl(in, holdout);
	corpus.source = path;

	std::set<std::string> ids;
	for (const auto& entry : corpus.entries) {
		if (!ids.insert(entry.id).second) {
			throw IngestError("duplicated series_id '" + entry.id + "'");
		}
	}
	return corpus;
}

}  // namespace flair
