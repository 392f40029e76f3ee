#include "wordlap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wordlap/errors.hpp"

namespace wordlap {

namespace {

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const std::size_t tab = line.find('\t');
    fields.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return fields;
}

bool has_duplicates(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) != values.end();
}

}  // namespace

std::string to_string(ScoreDirection direction) {
  return direction == ScoreDirection::higher_better ? "higher-better" : "lower-better";
}

ScoreDirection score_direction_from_string(std::string_view text) {
  if (text == "higher-better") return ScoreDirection::higher_better;
  if (text == "lower-better") return ScoreDirection::lower_better;
  throw FormatError("unknown score direction '" + std::string(text) +
                    "' (expected higher-better or lower-better)");
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Tied block [i, j] shares the mean of its 1-based positions.
    const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw FormatError("spearman: input lengths differ");
  if (xs.size() < 2) throw FormatError("spearman: need at least 2 points");

  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n + 1.0) / 2.0;

  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("spearman: zero rank variance");
  return sxy / std::sqrt(sxx * syy);
}

RankInversionResult rank_inversion(const std::vector<OverlapRecord>& records) {
  if (records.size() < 2) throw FormatError("rank_inversion: need at least 2 records");
  const std::string& benchmark = records.front().benchmark_label;
  const ScoreDirection direction = records.front().score_direction;
  for (const auto& record : records) {
    if (record.benchmark_label != benchmark) {
      throw FormatError("rank_inversion: mixed benchmarks (" + benchmark + " vs " +
                        record.benchmark_label + ")");
    }
    if (!record.score) {
      throw FormatError("rank_inversion: record '" + record.corpus_label + "' has no score");
    }
    if (record.score_direction != direction) {
      throw FormatError("rank_inversion: mixed score directions within benchmark " + benchmark);
    }
  }

  RankInversionResult result;
  std::vector<double> entropies;
  std::vector<double> scores;
  for (const auto& record : records) {
    entropies.push_back(record.cross_entropy_bits);
    scores.push_back(*record.score);
  }
  if (has_duplicates(entropies) || has_duplicates(scores)) {
    result.ties = true;
    result.inverted = false;
    result.diagnostic = "tie detected: orderings are not strict";
    return result;
  }

  std::vector<std::size_t> by_entropy(records.size());
  std::iota(by_entropy.begin(), by_entropy.end(), 0);
  std::sort(by_entropy.begin(), by_entropy.end(),
            [&](std::size_t a, std::size_t b) { return entropies[a] < entropies[b]; });
  std::vector<std::size_t> by_score = by_entropy;
  std::sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) {
    return direction == ScoreDirection::higher_better ? scores[a] > scores[b]
                                                      : scores[a] < scores[b];
  });

  for (const std::size_t i : by_entropy) result.entropy_order.push_back(records[i].corpus_label);
  for (const std::size_t i : by_score) result.score_order.push_back(records[i].corpus_label);
  result.inverted = by_entropy == by_score;
  return result;
}

ReportDocument build_report(const std::vector<OverlapRecord>& records) {
  if (records.empty()) throw FormatError("build_report: no records");

  ReportDocument report;
  for (const auto& record : records) {
    auto it = std::find_if(report.groups.begin(), report.groups.end(),
                           [&](const BenchmarkGroup& g) { return g.benchmark ==
                                                                 record.benchmark_label; });
    if (it == report.groups.end()) {
      report.groups.push_back(BenchmarkGroup{record.benchmark_label, {}, {}});
      it = std::prev(report.groups.end());
    }
    it->rows.push_back(record);
  }

  for (auto& group : report.groups) {
    CorrelationReport& corr = group.correlation;
    const bool all_scored = std::all_of(group.rows.begin(), group.rows.end(),
                                        [](const OverlapRecord& r) { return r.score.has_value(); });
    corr.n_points = static_cast<std::size_t>(
        std::count_if(group.rows.begin(), group.rows.end(),
                      [](const OverlapRecord& r) { return r.score.has_value(); }));
    if (!all_scored) {
      corr.note = "missing scores in group";
      continue;
    }
    if (group.rows.size() < 2) {
      corr.note = "fewer than 2 points";
      continue;
    }
    std::vector<double> entropies;
    std::vector<double> scores;
    for (const auto& row : group.rows) {
      entropies.push_back(row.cross_entropy_bits);
      scores.push_back(*row.score);
    }
    corr.entropy_ranks = average_ranks(entropies);
    corr.score_ranks = average_ranks(scores);
    try {
      corr.coefficient = spearman(entropies, scores);
    } catch (const NumericError& e) {
      corr.note = e.what();
    }
    corr.inversion = rank_inversion(group.rows);
    if (corr.inversion->ties && corr.note.empty()) corr.note = corr.inversion->diagnostic;
  }
  return report;
}

std::vector<ScoreEntry> parse_scores_tsv(std::istream& in, std::string_view origin) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<ScoreEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "benchmark\tcorpus\tscore\tdirection") {
        throw FormatError(std::string(origin) +
                          ":1: expected header 'benchmark<TAB>corpus<TAB>score<TAB>direction'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw FormatError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": expected 4 tab-separated fields");
    }
    ScoreEntry entry;
    entry.benchmark = std::string(fields[0]);
    entry.corpus = std::string(fields[1]);
    try {
      entry.score = std::stod(std::string(fields[2]));
    } catch (const std::exception&) {
      throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": bad score '" +
                        std::string(fields[2]) + "'");
    }
    entry.direction = score_direction_from_string(fields[3]);
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ScoreEntry> read_scores_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  return parse_scores_tsv(in, path.string());
}

std::size_t attach_scores(std::vector<OverlapRecord>& records,
                          const std::vector<ScoreEntry>& scores) {
  std::size_t attached = 0;
  for (auto& record : records) {
    for (const auto& entry : scores) {
      if (entry.benchmark == record.benchmark_label && entry.corpus == record.corpus_label) {
        record.score = entry.score;
        record.score_direction = entry.direction;
        ++attached;
        break;
      }
    }
  }
  return attached;
}

void to_json(nlohmann::json& j, const OverlapRecord& record) {
  j = nlohmann::json{{"corpus", record.corpus_label},
                     {"benchmark", record.benchmark_label},
                     {"cross_entropy_bits", record.cross_entropy_bits},
                     {"eval_token_total", record.eval_token_total},
                     {"score_direction", to_string(record.score_direction)}};
  if (record.eval_entropy_bits) j["eval_entropy_bits"] = *record.eval_entropy_bits;
  if (record.kl_bits) j["kl_bits"] = *record.kl_bits;
  if (record.coverage) j["coverage"] = *record.coverage;
  if (record.score) j["score"] = *record.score;
}

void from_json(const nlohmann::json& j, OverlapRecord& record) {
  record.corpus_label = j.at("corpus").get<std::string>();
  record.benchmark_label = j.at("benchmark").get<std::string>();
  record.cross_entropy_bits = j.at("cross_entropy_bits").get<double>();
  record.eval_token_total = j.value("eval_token_total", std::uint64_t{0});
  record.score_direction = score_direction_from_string(j.value("score_direction",
                                                               "higher-better"));
  record.eval_entropy_bits.reset();
  record.kl_bits.reset();
  record.coverage.reset();
  record.score.reset();
  if (j.contains("eval_entropy_bits")) record.eval_entropy_bits = j["eval_entropy_bits"];
  if (j.contains("kl_bits")) record.kl_bits = j["kl_bits"];
  if (j.contains("coverage")) record.coverage = j["coverage"].get<CoverageReport>();
  if (j.contains("score")) record.score = j["score"];

  if (record.eval_entropy_bits && record.kl_bits) {
    const double residual =
        record.cross_entropy_bits - (*record.eval_entropy_bits + *record.kl_bits);
    if (std::abs(residual) > 1e-9) {
      throw FormatError("record " + record.corpus_label + "/" + record.benchmark_label +
                        ": cross-entropy != entropy + KL (residual " + std::to_string(residual) +
                        ")");
    }
  }
}

void to_json(nlohmann::json& j, const ReportDocument& report) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& group : report.groups) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : group.rows) rows.push_back(row);
    nlohmann::json g{{"benchmark", group.benchmark}, {"rows", rows}};
    const CorrelationReport& corr = group.correlation;
    g["spearman"] = corr.coefficient ? nlohmann::json(*corr.coefficient) : nlohmann::json();
    g["n_points"] = corr.n_points;
    if (corr.inversion) {
      g["rank_inversion"] = corr.inversion->inverted;
      g["ties"] = corr.inversion->ties;
      g["entropy_order"] = corr.inversion->entropy_order;
      g["score_order"] = corr.inversion->score_order;
    } else {
      g["rank_inversion"] = nlohmann::json();
      g["ties"] = false;
    }
    if (!corr.entropy_ranks.empty()) {
      g["entropy_ranks"] = corr.entropy_ranks;
      g["score_ranks"] = corr.score_ranks;
    }
    if (!corr.note.empty()) g["note"] = corr.note;
    groups.push_back(std::move(g));
  }
  j = nlohmann::json{{"version", report.version}, {"groups", groups}};
  if (!report.config.empty()) j["config"] = report.config;
}

void from_json(const nlohmann::json& j, ReportDocument& report) {
  report.version = j.at("version").get<int>();
  report.config = j.value("config", std::string{});
  report.groups.clear();
  for (const auto& g : j.at("groups")) {
    BenchmarkGroup group;
    group.benchmark = g.at("benchmark").get<std::string>();
    for (const auto& row : g.at("rows")) group.rows.push_back(row.get<OverlapRecord>());
    CorrelationReport& corr = group.correlation;
    if (g.contains("spearman") && !g["spearman"].is_null()) corr.coefficient = g["spearman"];
    corr.n_points = g.value("n_points", std::size_t{0});
    if (g.contains("rank_inversion") && !g["rank_inversion"].is_null()) {
      RankInversionResult inv;
      inv.inverted = g["rank_inversion"].get<bool>();
      inv.ties = g.value("ties", false);
      if (g.contains("entropy_order")) {
        inv.entropy_order = g["entropy_order"].get<std::vector<std::string>>();
      }
      if (g.contains("score_order")) {
        inv.score_order = g["score_order"].get<std::vector<std::string>>();
      }
      corr.inversion = std::move(inv);
    }
    if (g.contains("entropy_ranks")) {
      corr.entropy_ranks = g["entropy_ranks"].get<std::vector<double>>();
      corr.score_ranks = g["score_ranks"].get<std::vector<double>>();
    }
    corr.note = g.value("note", std::string{});
    if (corr.inversion && corr.inversion->ties && !corr.note.empty()) {
      corr.inversion->diagnostic = corr.note;
    }
    report.groups.push_back(std::move(group));
  }
}

nlohmann::json records_to_json(const std::vector<OverlapRecord>& records,
                               const std::string& config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& record : records) rows.push_back(record);
  nlohmann::json j{{"version", 1}, {"records", rows}};
  if (!config.empty()) j["config"] = config;
  return j;
}

std::vector<OverlapRecord> records_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("records")) {
    throw FormatError("records file must be an object with a 'records' array");
  }
  std::vector<OverlapRecord> records;
  for (const auto& row : j.at("records")) records.push_back(row.get<OverlapRecord>());
  return records;
}

std::vector<OverlapRecord> read_records_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return records_from_json(j);
}

std::string report_tsv(const ReportDocument& report) {
  std::ostringstream out;
  out << "benchmark\tcorpus\tcross_entropy\teval_entropy\tkl\teval_tokens\tscore\tdirection"
         "\tspearman\trank_inversion\tties\n";
  for (const auto& group : report.groups) {
    for (const auto& row : group.rows) {
      out << group.benchmark << '\t' << row.corpus_label << '\t'
          << fmt6(row.cross_entropy_bits) << '\t'
          << (row.eval_entropy_bits ? fmt6(*row.eval_entropy_bits) : "") << '\t'
          << (row.kl_bits ? fmt6(*row.kl_bits) : "") << '\t' << row.eval_token_total << '\t'
          << (row.score ? fmt6(*row.score) : "") << '\t' << to_string(row.score_direction)
          << '\t'
          << (group.correlation.coefficient ? fmt6(*group.correlation.coefficient) : "") << '\t'
          << (group.correlation.inversion
                  ? (group.correlation.inversion->inverted ? "true" : "false")
                  : "")
          << '\t' << (group.correlation.inversion && group.correlation.inversion->ties ? "true"
                                                                                       : "false")
          << '\n';
    }
  }
  return std::move(out).str();
}

std::string plot_data_tsv(const BenchmarkGroup& group) {
  std::vector<const OverlapRecord*> rows;
  for (const auto& row : group.rows) {
    if (row.score) rows.push_back(&row);
  }
  std::sort(rows.begin(), rows.end(), [](const OverlapRecord* a, const OverlapRecord* b) {
    return a->cross_entropy_bits < b->cross_entropy_bits;
  });
  std::ostringstream out;
  for (const OverlapRecord* row : rows) {
    out << fmt6(row->cross_entropy_bits) << '\t' << fmt6(*row->score) << '\n';
  }
  return std::move(out).str();
}

}  // namespace wordlap
