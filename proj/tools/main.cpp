// wordlap: word-level overlap metrics between corpora and eval sets.
//
// Subcommands: count, entropy, coverage, ngram, synth, compare, correlate,
// plot-data. Exit codes: 0 success, 1 usage error, 2 input/format error,
// 3 numerical error. Progress and diagnostics go to stderr; stdout stays
// machine-consumable.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "wordlap/analysis.hpp"
#include "wordlap/corpus.hpp"
#include "wordlap/coverage.hpp"
#include "wordlap/distributions.hpp"
#include "wordlap/errors.hpp"
#include "wordlap/markov.hpp"

namespace {

using namespace wordlap;

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

// Every run echoes its resolved configuration so outputs are reproducible
// from the log alone.
void echo_config(const std::string& subcommand,
                 const std::vector<std::pair<std::string, std::string>>& kv) {
  std::cerr << "config\tsubcommand=" << subcommand;
  for (const auto& [k, v] : kv) std::cerr << '\t' << k << '=' << v;
  std::cerr << '\n';
}

std::string config_line(const std::string& subcommand,
                        const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream out;
  out << "subcommand=" << subcommand;
  for (const auto& [k, v] : kv) out << ' ' << k << '=' << v;
  return std::move(out).str();
}

std::vector<std::string> split_commas(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::string_view rest = item;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view piece = rest.substr(0, comma);
      if (!piece.empty()) out.emplace_back(piece);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return out;
}

CorpusFormat parse_format(const std::string& name) {
  if (name == "plain") return CorpusFormat::plain_lines;
  if (name == "jsonl") return CorpusFormat::jsonl;
  throw FormatError("unknown format '" + name + "' (expected plain or jsonl)");
}

std::vector<double> parse_thresholds(const std::string& raw) {
  std::vector<double> out;
  for (const auto& piece : split_commas({raw})) {
    try {
      out.push_back(std::stod(piece));
    } catch (const std::exception&) {
      throw FormatError("bad threshold '" + piece + "'");
    }
  }
  return out;
}

// Writes to the given path, or stdout when the path is empty or "-".
void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + out_path);
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + out_path);
}

void print_count_stats(const CountResult& result) {
  std::cerr << "stats\tdocuments=" << result.stats.documents
            << "\ttotal_tokens=" << result.table.total_tokens()
            << "\tvocab=" << result.table.vocab_size()
            << "\tskipped_lines=" << result.stats.skipped_lines
            << "\tutf8_replacements=" << result.stats.utf8_replacements << '\n';
}

struct EvalFlags {
  std::string format = "plain";
  std::string text_field = "text";
  bool ascii_ws = false;
  std::string label;
};

void add_eval_flags(CLI::App* cmd, EvalFlags& flags) {
  cmd->add_option("--eval-format", flags.format, "Eval corpus format: plain or jsonl")
      ->check(CLI::IsMember({"plain", "jsonl"}));
  cmd->add_option("--text-field", flags.text_field, "JSONL key holding the document text");
  cmd->add_flag("--ascii-ws", flags.ascii_ws, "Split on ASCII whitespace only");
  cmd->add_option("--eval-label", flags.label, "Benchmark label (default: file stem)");
}

CountResult count_eval(const std::string& path, const EvalFlags& flags) {
  CorpusSource source;
  source.path = path;
  source.format = parse_format(flags.format);
  source.text_field = flags.text_field;
  CountOptions opts;
  opts.tokenize.ascii_whitespace_only = flags.ascii_ws;
  opts.label = flags.label;
  return count_corpus(source, opts);
}

OverlapRecord make_record(const WordFrequencyTable& pre, const WordFrequencyTable& eval_table,
                          const std::vector<double>* thresholds) {
  const EmpiricalDistribution eval_dist = EmpiricalDistribution::from_table(eval_table);
  const SmoothedUnigram smoothed(pre, eval_table);
  OverlapRecord record;
  record.corpus_label = pre.source_label();
  record.benchmark_label = eval_table.source_label();
  record.cross_entropy_bits = cross_entropy_bits(eval_dist, smoothed);
  record.eval_entropy_bits = entropy_bits(eval_dist);
  record.kl_bits = kl_divergence_bits(eval_dist, smoothed);
  record.eval_token_total = eval_table.total_tokens();
  if (thresholds != nullptr) record.coverage = coverage(pre, eval_table, *thresholds);
  return record;
}

// ---- subcommand runners ----

struct CountArgs {
  std::vector<std::string> inputs;
  std::string format = "plain";
  std::string text_field = "text";
  std::string out;
  std::string label;
  int threads = 1;
  bool lenient = false;
  bool ascii_ws = false;
  std::size_t max_line_bytes = 32ull << 20;
};

int run_count(const CountArgs& args) {
  const std::vector<std::string> paths = split_commas(args.inputs);
  echo_config("count", {{"input", CLI::detail::join(paths)},
                        {"format", args.format},
                        {"text_field", args.text_field},
                        {"out", args.out.empty() ? "-" : args.out},
                        {"label", args.label},
                        {"threads", std::to_string(args.threads)},
                        {"lenient", args.lenient ? "1" : "0"},
                        {"ascii_ws", args.ascii_ws ? "1" : "0"}});
  std::vector<CorpusSource> sources;
  for (const auto& path : paths) {
    CorpusSource source;
    source.path = path;
    source.format = parse_format(args.format);
    source.text_field = args.text_field;
    sources.push_back(std::move(source));
  }
  CountOptions opts;
  opts.threads = args.threads;
  opts.lenient = args.lenient;
  opts.tokenize.ascii_whitespace_only = args.ascii_ws;
  opts.label = args.label;
  opts.max_line_bytes = args.max_line_bytes;
  const CountResult result = count_corpora(sources, opts);
  print_count_stats(result);
  write_output(args.out, serialize_table(result.table));
  return 0;
}

struct EntropyArgs {
  std::string pre;
  std::string eval;
  EvalFlags eval_flags;
  bool nats = false;
  bool json = false;
  std::string out;
};

int run_entropy(const EntropyArgs& args) {
  echo_config("entropy", {{"pre", args.pre},
                          {"eval", args.eval},
                          {"eval_format", args.eval_flags.format},
                          {"nats", args.nats ? "1" : "0"},
                          {"json", args.json ? "1" : "0"}});
  const WordFrequencyTable pre = read_table_file(args.pre);
  const CountResult eval_result = count_eval(args.eval, args.eval_flags);
  const OverlapRecord record = make_record(pre, eval_result.table, nullptr);

  const double unit = args.nats ? kBitsToNats : 1.0;
  const char* unit_name = args.nats ? "nats" : "bits";
  if (args.json) {
    nlohmann::json j = record;
    j["unit"] = "bits";
    write_output(args.out, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "corpus\tbenchmark\tcross_entropy\teval_entropy\tkl\teval_tokens\tunit\n"
        << record.corpus_label << '\t' << record.benchmark_label << '\t'
        << fmt6(record.cross_entropy_bits * unit) << '\t'
        << fmt6(*record.eval_entropy_bits * unit) << '\t' << fmt6(*record.kl_bits * unit) << '\t'
        << record.eval_token_total << '\t' << unit_name << '\n';
    write_output(args.out, std::move(out).str());
  }
  return 0;
}

struct CoverageArgs {
  std::string pre;
  std::string eval;
  EvalFlags eval_flags;
  std::string thresholds = "0.80,0.95";
  bool json = false;
  std::string out;
};

int run_coverage(const CoverageArgs& args) {
  echo_config("coverage", {{"pre", args.pre},
                           {"eval", args.eval},
                           {"thresholds", args.thresholds},
                           {"json", args.json ? "1" : "0"}});
  const WordFrequencyTable pre = read_table_file(args.pre);
  const CountResult eval_result = count_eval(args.eval, args.eval_flags);
  const std::vector<double> thresholds = parse_thresholds(args.thresholds);
  const CoverageReport report = coverage(pre, eval_result.table, thresholds);

  if (args.json) {
    nlohmann::json j = report;
    j["corpus"] = pre.source_label();
    j["benchmark"] = eval_result.table.source_label();
    write_output(args.out, j.dump(2) + "\n");
  } else {
    write_output(args.out, coverage_tsv_header(thresholds) + "\n" +
                               coverage_tsv_row(pre.source_label(),
                                                eval_result.table.source_label(), report) +
                               "\n");
  }
  return 0;
}

struct NgramArgs {
  std::string b_spec;
  std::string a_spec;
  int n = 2;
  std::string empirical;
  std::string model_tokens;
  double alpha = 1.0;
  bool ascii_ws = false;
  bool json = false;
  std::string out;
};

int run_ngram(const NgramArgs& args) {
  echo_config("ngram", {{"b", args.b_spec},
                        {"a", args.a_spec},
                        {"n", std::to_string(args.n)},
                        {"empirical", args.empirical},
                        {"model_tokens", args.model_tokens},
                        {"alpha", fmt6(args.alpha)}});
  const MarkovChainSpec b = MarkovChainSpec::load(args.b_spec);
  const MarkovChainSpec a = MarkovChainSpec::load(args.a_spec);
  const NGramDecomposition decomp = ngram_decomposition(b, a, args.n);

  std::optional<double> empirical_total;
  std::uint64_t empirical_tokens = 0;
  std::string model_source = "analytic";
  if (!args.empirical.empty()) {
    TokenizeOptions topts;
    topts.ascii_whitespace_only = args.ascii_ws;
    const std::vector<std::string> eval_tokens = read_token_stream(args.empirical, topts);
    empirical_tokens = eval_tokens.size();
    if (!args.model_tokens.empty()) {
      const std::vector<std::string> train_tokens = read_token_stream(args.model_tokens, topts);
      const EmpiricalNGramModel model(train_tokens, args.n, args.alpha);
      empirical_total = empirical_cross_entropy_bits(eval_tokens, model);
      model_source = "estimated";
    } else {
      empirical_total = empirical_cross_entropy_bits(eval_tokens, a, args.n);
    }
  }

  if (args.json) {
    nlohmann::json j{{"b", b.label()},
                     {"a", a.label()},
                     {"n", args.n},
                     {"entropy_rate", decomp.entropy_rate},
                     {"misspecification", decomp.misspecification},
                     {"mismatch", decomp.mismatch},
                     {"total", decomp.total}};
    if (empirical_total) {
      j["empirical_total"] = *empirical_total;
      j["empirical_tokens"] = empirical_tokens;
      j["model_source"] = model_source;
    }
    write_output(args.out, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "b\ta\tn\tentropy_rate\tmisspecification\tmismatch\ttotal";
    if (empirical_total) out << "\tempirical_total\tempirical_tokens\tmodel_source";
    out << '\n'
        << b.label() << '\t' << a.label() << '\t' << args.n << '\t' << fmt6(decomp.entropy_rate)
        << '\t' << fmt6(decomp.misspecification) << '\t' << fmt6(decomp.mismatch) << '\t'
        << fmt6(decomp.total);
    if (empirical_total) {
      out << '\t' << fmt6(*empirical_total) << '\t' << empirical_tokens << '\t' << model_source;
    }
    out << '\n';
    write_output(args.out, std::move(out).str());
  }
  return 0;
}

struct SynthArgs {
  std::string spec;
  std::uint64_t length = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::uint64_t words_per_line = 1000;
};

int run_synth(const SynthArgs& args) {
  const auto kv = std::vector<std::pair<std::string, std::string>>{
      {"spec", args.spec},
      {"length", std::to_string(args.length)},
      {"seed", std::to_string(args.seed)},
      {"out", args.out},
      {"words_per_line", std::to_string(args.words_per_line)}};
  echo_config("synth", kv);
  if (args.length == 0) throw FormatError("--length must be >= 1");
  if (args.words_per_line == 0) throw FormatError("--words-per-line must be >= 1");
  const MarkovChainSpec spec = MarkovChainSpec::load(args.spec);
  const std::vector<std::string> tokens = sample_tokens(spec, args.length, args.seed);

  std::string body;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    body += tokens[i];
    body += (i + 1) % args.words_per_line == 0 || i + 1 == tokens.size() ? '\n' : ' ';
  }
  write_output(args.out, body);
  if (!args.out.empty() && args.out != "-") {
    // Token files must stay pure tokens, so provenance goes to a sidecar.
    std::ofstream meta(args.out + ".meta");
    meta << "config\t" << config_line("synth", kv) << '\n'
         << "chain_label\t" << spec.label() << '\n';
  }
  return 0;
}

struct CompareArgs {
  std::vector<std::string> pre;
  std::vector<std::string> eval;
  EvalFlags eval_flags;
  std::string thresholds = "0.80,0.95";
  int threads = 1;
  std::string out;
};

int run_compare(const CompareArgs& args) {
  const std::vector<std::string> pre_paths = split_commas(args.pre);
  const std::vector<std::string> eval_paths = split_commas(args.eval);
  const auto kv = std::vector<std::pair<std::string, std::string>>{
      {"pre", CLI::detail::join(pre_paths)},
      {"eval", CLI::detail::join(eval_paths)},
      {"thresholds", args.thresholds},
      {"threads", std::to_string(args.threads)}};
  echo_config("compare", kv);
  const std::vector<double> thresholds = parse_thresholds(args.thresholds);

  std::vector<WordFrequencyTable> pre_tables;
  pre_tables.reserve(pre_paths.size());
  for (const auto& path : pre_paths) pre_tables.push_back(read_table_file(path));
  std::vector<WordFrequencyTable> eval_tables;
  eval_tables.reserve(eval_paths.size());
  for (const auto& path : eval_paths) {
    EvalFlags flags = args.eval_flags;
    flags.label.clear();  // per-file stems when several evals are given
    eval_tables.push_back(count_eval(path, flags).table);
  }

  // A fresh smoothed model per pair: the union vocabulary differs per pair.
  const std::size_t pairs = pre_tables.size() * eval_tables.size();
  std::vector<OverlapRecord> records(pairs);
  const int threads = std::max(1, args.threads);
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= pairs) return;
      try {
        const WordFrequencyTable& pre = pre_tables[i / eval_tables.size()];
        const WordFrequencyTable& eval_table = eval_tables[i % eval_tables.size()];
        records[i] = make_record(pre, eval_table, &thresholds);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  write_output(args.out,
               records_to_json(records, config_line("compare", kv)).dump(2) + "\n");
  return 0;
}

struct CorrelateArgs {
  std::string records;
  std::string scores;
  bool tsv = false;
  std::string out;
};

int run_correlate(const CorrelateArgs& args) {
  const auto kv = std::vector<std::pair<std::string, std::string>>{
      {"records", args.records}, {"scores", args.scores}, {"tsv", args.tsv ? "1" : "0"}};
  echo_config("correlate", kv);
  std::vector<OverlapRecord> records = read_records_file(args.records);
  const std::vector<ScoreEntry> scores = read_scores_file(args.scores);
  const std::size_t attached = attach_scores(records, scores);
  std::cerr << "info\tattached_scores=" << attached << "/" << records.size() << '\n';

  ReportDocument report = build_report(records);
  report.config = config_line("correlate", kv);
  if (args.tsv) {
    write_output(args.out, report_tsv(report));
  } else {
    write_output(args.out, nlohmann::json(report).dump(2) + "\n");
  }
  return 0;
}

struct PlotDataArgs {
  std::string records;
  std::string scores;
  std::string out_dir = ".";
};

std::string sanitize_filename(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out.empty() ? "_" : out;
}

int run_plot_data(const PlotDataArgs& args) {
  echo_config("plot-data",
              {{"records", args.records}, {"scores", args.scores}, {"out_dir", args.out_dir}});
  std::vector<OverlapRecord> records = read_records_file(args.records);
  if (!args.scores.empty()) attach_scores(records, read_scores_file(args.scores));
  const ReportDocument report = build_report(records);

  std::filesystem::create_directories(args.out_dir);
  for (const auto& group : report.groups) {
    const std::string body = plot_data_tsv(group);
    if (body.empty()) {
      std::cerr << "info\tskipping benchmark without scores: " << group.benchmark << '\n';
      continue;
    }
    const std::filesystem::path path =
        std::filesystem::path(args.out_dir) / (sanitize_filename(group.benchmark) + ".tsv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << body;
    std::cout << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word-level overlap metrics between corpora and benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wordlap 0.1.0");

  CountArgs count_args;
  auto* count_cmd = app.add_subcommand("count", "Build a word-frequency table artifact");
  count_cmd->add_option("--input", count_args.inputs, "Input file(s), repeatable or comma-joined")
      ->required();
  count_cmd->add_option("--format", count_args.format, "plain or jsonl")
      ->check(CLI::IsMember({"plain", "jsonl"}));
  count_cmd->add_option("--text-field", count_args.text_field, "JSONL key with the text");
  count_cmd->add_option("--out", count_args.out, "Output artifact path (default stdout)");
  count_cmd->add_option("--label", count_args.label, "Source label (default: first file stem)");
  count_cmd->add_option("--threads", count_args.threads, "Shard count")->check(CLI::Range(1, 256));
  count_cmd->add_flag("--lenient", count_args.lenient, "Skip malformed JSONL lines");
  count_cmd->add_flag("--ascii-ws", count_args.ascii_ws, "Split on ASCII whitespace only");
  count_cmd->add_option("--max-line-bytes", count_args.max_line_bytes, "Per-line size cap");

  EntropyArgs entropy_args;
  auto* entropy_cmd =
      app.add_subcommand("entropy", "Cross-entropy, entropy, and KL for one (corpus, eval) pair");
  entropy_cmd->add_option("--pre", entropy_args.pre, "Pre-training frequency table")->required();
  entropy_cmd->add_option("--eval", entropy_args.eval, "Eval corpus file")->required();
  add_eval_flags(entropy_cmd, entropy_args.eval_flags);
  entropy_cmd->add_flag("--nats", entropy_args.nats, "Report nats instead of bits");
  entropy_cmd->add_flag("--json", entropy_args.json, "JSON output");
  entropy_cmd->add_option("--out", entropy_args.out, "Output path (default stdout)");

  CoverageArgs coverage_args;
  auto* coverage_cmd = app.add_subcommand("coverage", "Head-mass coverage buckets for an eval set");
  coverage_cmd->add_option("--pre", coverage_args.pre, "Pre-training frequency table")->required();
  coverage_cmd->add_option("--eval", coverage_args.eval, "Eval corpus file")->required();
  add_eval_flags(coverage_cmd, coverage_args.eval_flags);
  coverage_cmd->add_option("--thresholds", coverage_args.thresholds, "Comma-joined mass fractions");
  coverage_cmd->add_flag("--json", coverage_args.json, "JSON output");
  coverage_cmd->add_option("--out", coverage_args.out, "Output path (default stdout)");

  NgramArgs ngram_args;
  auto* ngram_cmd =
      app.add_subcommand("ngram", "Three-term n-gram cross-entropy decomposition of two chains");
  ngram_cmd->add_option("--b", ngram_args.b_spec, "Source chain spec JSON (the eval side)")
      ->required();
  ngram_cmd->add_option("--a", ngram_args.a_spec, "Model chain spec JSON")->required();
  ngram_cmd->add_option("--n", ngram_args.n, "Model order n (context length n-1)")->required();
  ngram_cmd->add_option("--empirical", ngram_args.empirical,
                        "Token stream sampled from b; adds an empirical total");
  ngram_cmd->add_option("--model-tokens", ngram_args.model_tokens,
                        "Estimate the model from this stream instead of spec a");
  ngram_cmd->add_option("--alpha", ngram_args.alpha, "Smoothing for the estimated model");
  ngram_cmd->add_flag("--ascii-ws", ngram_args.ascii_ws, "Split on ASCII whitespace only");
  ngram_cmd->add_flag("--json", ngram_args.json, "JSON output");
  ngram_cmd->add_option("--out", ngram_args.out, "Output path (default stdout)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Sample a plain-lines token file from a chain spec");
  synth_cmd->add_option("--spec", synth_args.spec, "Chain spec JSON")->required();
  synth_cmd->add_option("--length", synth_args.length, "Token count")->required();
  synth_cmd->add_option("--seed", synth_args.seed, "RNG seed")->required();
  synth_cmd->add_option("--out", synth_args.out, "Output token file (default stdout)");
  synth_cmd->add_option("--words-per-line", synth_args.words_per_line, "Tokens per output line");

  CompareArgs compare_args;
  auto* compare_cmd =
      app.add_subcommand("compare", "Full overlap-record matrix over corpora x eval sets");
  compare_cmd->add_option("--pre", compare_args.pre, "Frequency tables, repeatable or comma-joined")
      ->required();
  compare_cmd->add_option("--eval", compare_args.eval, "Eval corpora, repeatable or comma-joined")
      ->required();
  add_eval_flags(compare_cmd, compare_args.eval_flags);
  compare_cmd->add_option("--thresholds", compare_args.thresholds, "Coverage thresholds");
  compare_cmd->add_option("--threads", compare_args.threads, "Pair-level parallelism")
      ->check(CLI::Range(1, 256));
  compare_cmd->add_option("--out", compare_args.out, "Records JSON path (default stdout)");

  CorrelateArgs correlate_args;
  auto* correlate_cmd =
      app.add_subcommand("correlate", "Per-benchmark rank statistics from records + scores");
  correlate_cmd->add_option("--records", correlate_args.records, "Records JSON")->required();
  correlate_cmd->add_option("--scores", correlate_args.scores, "Scores TSV")->required();
  correlate_cmd->add_flag("--tsv", correlate_args.tsv, "TSV report instead of JSON");
  correlate_cmd->add_option("--out", correlate_args.out, "Output path (default stdout)");

  PlotDataArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot-data", "Per-benchmark (entropy, score) TSV files");
  plot_cmd->add_option("--records", plot_args.records, "Records JSON")->required();
  plot_cmd->add_option("--scores", plot_args.scores, "Scores TSV (optional)");
  plot_cmd->add_option("--out-dir", plot_args.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error\tusage\t" << e.what() << '\n';
    return 1;
  }

  try {
    if (count_cmd->parsed()) return run_count(count_args);
    if (entropy_cmd->parsed()) return run_entropy(entropy_args);
    if (coverage_cmd->parsed()) return run_coverage(coverage_args);
    if (ngram_cmd->parsed()) return run_ngram(ngram_args);
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (compare_cmd->parsed()) return run_compare(compare_args);
    if (correlate_cmd->parsed()) return run_correlate(correlate_args);
    if (plot_cmd->parsed()) return run_plot_data(plot_args);
  } catch (const IoError& e) {
    std::cerr << "error\tio\t" << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error\tformat\t" << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error\tnumeric\t" << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error\tinternal\t" << e.what() << '\n';
    return 3;
  }
  return 0;
}
