#include <algorithm>
#include <cctype>
#include <chrono>
#include <csignal>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/cli.hpp"
#include "cli/curation_server.hpp"
#include "semantify/corpus.hpp"
#include "semantify/corpus_io.hpp"
#include "semantify/error.hpp"
#include "semantify/evaluation.hpp"
#include "semantify/kgexport.hpp"
#include "semantify/neural_client.hpp"
#include "semantify/pairgen.hpp"
#include "semantify/random.hpp"
#include "semantify/scoring.hpp"
#include "semantify/synthetic.hpp"

namespace semantify::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Per-assay reference wall time for semantifying one assay.
constexpr double kReferenceSecondsPerAssay = 4.0;

struct CorpusOptions {
  std::string path;
  std::string format = "jsonl";
  std::string annotations;
  std::string filter_policy;
};

struct ScorerOptions {
  std::string kind = "frequency";
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  double l2 = LexicalHyperparams{}.l2;
  std::string endpoint = ServiceEndpoint{}.base_address;
  double timeout = ServiceEndpoint{}.timeout_seconds;
  std::size_t max_in_flight = ServiceEndpoint{}.max_in_flight;
  std::size_t max_sequence_length = Hyperparams{}.max_sequence_length;
};

// Everything a subcommand may need; each subcommand registers the subset it uses.
struct RunConfig {
  CorpusOptions corpus;
  ScorerOptions scorer;
  std::uint64_t seed = 0;
  std::size_t false_per_assay = SamplingConfig{}.false_per_assay;
  std::string refresh = "once";
  std::size_t folds = 3;
  std::optional<double> threshold;
  std::string mode = "both";
  std::string output_dir;
  bool sequential = false;
};

// ---------------------------------------------------------------------------
// Option registration

void add_corpus_options(CLI::App* cmd, CorpusOptions& o) {
  cmd->add_option("--corpus", o.path, "Corpus file (JSONL, or the descriptions TSV)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--format", o.format, "Corpus dialect")
      ->check(CLI::IsMember({"jsonl", "two-file"}))
      ->capture_default_str();
  cmd->add_option("--annotations", o.annotations, "Annotations TSV for --format two-file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--filter-policy", o.filter_policy, "JSON policy of non-informative statements")
      ->check(CLI::ExistingFile);
}

void add_seed(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--seed", c.seed, "Run seed; all randomness derives from it")
      ->capture_default_str();
}

void add_scorer_options(CLI::App* cmd, ScorerOptions& o) {
  cmd->add_option("--scorer", o.kind, "Scorer kind")
      ->check(CLI::IsMember({"frequency", "lexical", "remote"}))
      ->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "Training epochs (lexical default 8, remote default 2)");
  cmd->add_option("--learning-rate", o.learning_rate, "Learning rate (lexical 0.05, remote 2e-5)");
  cmd->add_option("--l2", o.l2, "L2 penalty of the lexical scorer")->capture_default_str();
  cmd->add_option("--endpoint", o.endpoint, "Inference service address for --scorer remote")
      ->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "Per-request timeout in seconds")->capture_default_str();
  cmd->add_option("--max-in-flight", o.max_in_flight, "Concurrent scoring requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-sequence-length", o.max_sequence_length, "Remote tokenizer limit")
      ->capture_default_str();
}

void add_sampling_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--false-per-assay", c.false_per_assay, "Negative pairs sampled per assay")
      ->capture_default_str();
  cmd->add_option("--refresh", c.refresh, "Negative sampling refresh policy")
      ->check(CLI::IsMember({"once", "per-epoch"}))
      ->capture_default_str();
}

void add_threshold(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--threshold", c.threshold, "Decision threshold (scorer default when omitted)")
      ->check(CLI::Range(0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Helpers

Corpus load(const CorpusOptions& o) {
  Corpus corpus;
  if (o.format == "two-file") {
    if (o.annotations.empty()) {
      throw UsageError("--format two-file needs --annotations");
    }
    corpus = load_corpus(o.path, CorpusFormat::two_file, o.annotations);
  } else {
    corpus = load_corpus(o.path);
  }
  if (!o.filter_policy.empty()) {
    corpus = filter_noninformative(corpus, load_filter_policy(o.filter_policy));
  }
  if (corpus.empty()) {
    throw ValidationError("corpus " + o.path + " has no usable assays");
  }
  return corpus;
}

SamplingConfig sampling_of(const RunConfig& c, std::uint64_t seed) {
  SamplingConfig s;
  s.false_per_assay = c.false_per_assay;
  s.seed = seed;
  s.refresh = c.refresh == "per-epoch" ? NegativeRefresh::per_epoch : NegativeRefresh::once_per_run;
  return s;
}

ServiceEndpoint endpoint_of(const ScorerOptions& o) {
  ServiceEndpoint e;
  e.base_address = o.endpoint;
  e.timeout_seconds = o.timeout;
  e.max_in_flight = o.max_in_flight;
  return e;
}

LexicalHyperparams lexical_of(const ScorerOptions& o, std::uint64_t seed) {
  LexicalHyperparams h;
  h.epochs = o.epochs.value_or(h.epochs);
  h.learning_rate = o.learning_rate.value_or(h.learning_rate);
  h.l2 = o.l2;
  h.seed = derive_seed(seed, "scorer");
  return h;
}

Hyperparams remote_of(const ScorerOptions& o, std::uint64_t seed) {
  Hyperparams h;
  h.epochs = o.epochs.value_or(h.epochs);
  h.learning_rate = o.learning_rate.value_or(h.learning_rate);
  h.max_sequence_length = o.max_sequence_length;
  h.seed = derive_seed(seed, "scorer");
  return h;
}

ScorerFactory factory_of(const ScorerOptions& o, std::uint64_t seed) {
  if (o.kind == "lexical") {
    const auto h = lexical_of(o, seed);
    return [h] { return std::make_unique<LexicalModel>(h); };
  }
  if (o.kind == "remote") {
    const auto e = endpoint_of(o);
    e.validate();
    const auto h = remote_of(o, seed);
    return [e, h] { return std::make_unique<RemoteScorer>(e, h); };
  }
  return [] { return std::make_unique<FrequencyModel>(); };
}

json scorer_config(const ScorerOptions& o, std::uint64_t seed) {
  json j = {{"kind", o.kind}};
  if (o.kind == "lexical") {
    const auto h = lexical_of(o, seed);
    j["epochs"] = h.epochs;
    j["learning_rate"] = h.learning_rate;
    j["l2"] = h.l2;
  } else if (o.kind == "remote") {
    const auto h = remote_of(o, seed);
    j["endpoint"] = o.endpoint;
    j["epochs"] = h.epochs;
    j["learning_rate"] = h.learning_rate;
    j["max_sequence_length"] = h.max_sequence_length;
  }
  return j;
}

json corpus_config(const CorpusOptions& o, const Corpus& c) {
  json j = {{"path", o.path},
            {"format", o.format},
            {"assays", c.size()},
            {"statements", c.vocabulary().size()}};
  if (!o.annotations.empty()) j["annotations"] = o.annotations;
  if (!o.filter_policy.empty()) j["filter_policy"] = o.filter_policy;
  return j;
}

std::vector<EvaluationMode> modes_of(const std::string& m) {
  if (m == "both") {
    return {EvaluationMode::sampled_pairs, EvaluationMode::full_vocabulary};
  }
  return {parse_evaluation_mode(m)};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Timestamps and durations live here only, so reports stay byte-identical.
void write_metadata(const fs::path& dir, const std::string& command, std::uint64_t seed,
                    const std::string& started, Clock::time_point t0) {
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  const json meta = {{"command", command},
                     {"seed", seed},
                     {"version", SEMANTIFY_VERSION},
                     {"started_at", started},
                     {"wall_seconds", seconds}};
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string safe_file_stem(std::string_view id) {
  std::string out;
  for (char ch : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
    out += ok ? ch : '_';
  }
  return out.empty() ? "_" : out;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_stats(const RunConfig& c, const std::string& output, std::ostream& out) {
  const auto corpus = load(c.corpus);
  const auto s = corpus_stats(corpus);
  const auto& d = corpus.diagnostics();
  out << "assays\t" << s.assay_count << '\n'
      << "statements\t" << s.vocabulary_size << '\n'
      << "annotations\t" << s.total_annotations << '\n'
      << "min_length\t" << s.min_length << '\n'
      << "max_length\t" << s.max_length << '\n'
      << "mean_length\t" << fixed(s.mean_length) << '\n'
      << "duplicates_collapsed\t" << d.duplicate_statements_collapsed << '\n'
      << "assays_dropped_empty\t" << d.assays_dropped_empty << '\n'
      << "statements_removed\t" << d.statements_removed << '\n'
      << "length\tassays\n";
  for (const auto& [len, n] : s.length_histogram) {
    out << len << '\t' << n << '\n';
  }
  if (!output.empty()) {
    json hist = json::array();
    for (const auto& [len, n] : s.length_histogram) {
      hist.push_back({{"length", len}, {"assays", n}});
    }
    const json doc = {{"command", "stats"},
                      {"seed", c.seed},
                      {"corpus", corpus_config(c.corpus, corpus)},
                      {"assays", s.assay_count},
                      {"statements", s.vocabulary_size},
                      {"annotations", s.total_annotations},
                      {"min_length", s.min_length},
                      {"max_length", s.max_length},
                      {"mean_length", s.mean_length},
                      {"diagnostics",
                       {{"duplicate_statements_collapsed", d.duplicate_statements_collapsed},
                        {"assays_dropped_empty", d.assays_dropped_empty},
                        {"statements_removed", d.statements_removed}}},
                      {"length_histogram", hist}};
    write_text(output, doc.dump(2) + "\n");
  }
  return kOk;
}

int cmd_train(const RunConfig& c, const std::string& model_out, std::ostream& out) {
  const auto corpus = load(c.corpus);
  const auto sampling = sampling_of(c, derive_seed(c.seed, "train-sampling"));
  const auto pairs = build_training_set(corpus, sampling);
  auto scorer = factory_of(c.scorer, c.seed)();
  scorer->train({corpus, pairs, sampling});
  save_model_file(*scorer, model_out);
  out << "trained " << scorer->kind() << " scorer on " << corpus.size() << " assays, "
      << pairs.size() << " pairs\n"
      << "default threshold\t" << fixed(scorer->default_threshold(), 6) << '\n'
      << "model\t" << model_out << '\n';
  return kOk;
}

struct FoldOutcome {
  std::vector<FoldResult> per_mode;
  std::vector<HitMissTrace> traces;
};

int cmd_evaluate(const RunConfig& c, const std::string& plot, std::ostream& out) {
  const auto started = utc_timestamp();
  const auto t0 = Clock::now();
  if (c.output_dir.empty()) {
    throw UsageError("--output-dir is required");
  }
  const auto corpus = load(c.corpus);
  const auto modes = modes_of(c.mode);
  const auto factory = factory_of(c.scorer, c.seed);
  const auto seeds = derive_run_seeds(c.seed);
  const auto sampling = sampling_of(c, 0);
  const auto folds = materialize_folds(corpus, split_folds(corpus, c.folds, seeds.folds));

  auto run_one = [&](const FoldCorpora& fold) {
    const auto scorer = train_fold_scorer(fold, factory, sampling, seeds);
    FoldOutcome o;
    for (auto m : modes) {
      o.per_mode.push_back(evaluate_fold(*scorer, fold, sampling, c.threshold, m, seeds));
    }
    if (!plot.empty()) {
      o.traces = hit_and_miss_all(*scorer, fold.test, !c.sequential);
    }
    return o;
  };
  std::vector<FoldOutcome> outcomes;
  if (c.sequential) {
    for (const auto& f : folds) outcomes.push_back(run_one(f));
  } else {
    std::vector<std::future<FoldOutcome>> pending;
    for (const auto& f : folds) {
      pending.push_back(std::async(std::launch::async, [&, fp = &f] { return run_one(*fp); }));
    }
    for (auto& p : pending) outcomes.push_back(p.get());
  }

  json results = json::object();
  out << "fold\tmode\tthreshold\tprecision\trecall\tf1\n";
  for (std::size_t m = 0; m < modes.size(); ++m) {
    std::vector<FoldResult> per_fold;
    for (const auto& o : outcomes) per_fold.push_back(o.per_mode[m]);
    const auto cv = summarize_folds(per_fold);
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
      const auto& r = cv.folds[f];
      out << f + 1 << '\t' << to_string(modes[m]) << '\t' << fixed(r.threshold) << '\t'
          << fixed(r.report.precision) << '\t' << fixed(r.report.recall) << '\t'
          << fixed(r.report.f1) << '\n';
    }
    out << "mean\t" << to_string(modes[m]) << "\t-\t" << fixed(cv.mean_precision) << '\t'
        << fixed(cv.mean_recall) << '\t' << fixed(cv.mean_f1) << '\n';
    results[to_string(modes[m])] = json::parse(cross_validation_json(cv));
  }

  json config = {{"corpus", corpus_config(c.corpus, corpus)},
                 {"scorer", scorer_config(c.scorer, c.seed)},
                 {"folds", c.folds},
                 {"false_per_assay", c.false_per_assay},
                 {"refresh", c.refresh},
                 {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)},
                 {"seed", c.seed}};
  json doc = {{"command", "evaluate"}, {"config", config}, {"results", results}};

  const fs::path dir = c.output_dir;
  if (!plot.empty()) {
    std::vector<HitMissTrace> traces;
    std::size_t misses = 0;
    for (auto& o : outcomes) {
      for (auto& t : o.traces) {
        misses += t.misses();
        traces.push_back(std::move(t));
      }
    }
    if (const auto parent = fs::path(plot).parent_path(); !parent.empty()) {
      fs::create_directories(parent);
    }
    emit_plot_data(traces, plot);
    doc["hit_and_miss"] = {{"assays", traces.size()},
                           {"total_misses", misses},
                           {"mean_misses", static_cast<double>(misses) /
                                               static_cast<double>(traces.size())}};
    out << "hit-and-miss grid\t" << plot << '\n';
  }
  write_text(dir / "report.json", doc.dump(2) + "\n");
  write_metadata(dir, "evaluate", c.seed, started, t0);
  out << "report\t" << (dir / "report.json").string() << '\n';
  return kOk;
}

int cmd_sweep(const RunConfig& c, const SweepRange& range, bool cross_validated,
              std::ostream& out) {
  const auto started = utc_timestamp();
  const auto t0 = Clock::now();
  if (c.output_dir.empty()) {
    throw UsageError("--output-dir is required");
  }
  if (c.mode == "both") {
    throw UsageError("sweep evaluates one mode; pass --mode sampled-pair or full-vocabulary");
  }
  const auto corpus = load(c.corpus);
  SweepOptions opts;
  opts.folds = c.folds;
  opts.cross_validated = cross_validated;
  opts.threshold = c.threshold;
  opts.mode = parse_evaluation_mode(c.mode);
  opts.seed = c.seed;
  const auto result = sweep_false_labels(corpus, factory_of(c.scorer, c.seed), range, opts);

  out << "false_per_assay\tprecision\trecall\tf1\n";
  for (const auto& p : result.points) {
    out << p.false_per_assay << '\t' << fixed(p.report.precision) << '\t'
        << fixed(p.report.recall) << '\t' << fixed(p.report.f1) << '\n';
  }
  out << "best\t" << result.points[result.best].false_per_assay << '\n';

  json config = {{"corpus", corpus_config(c.corpus, corpus)},
                 {"scorer", scorer_config(c.scorer, c.seed)},
                 {"folds", c.folds},
                 {"cross_validated", cross_validated},
                 {"mode", to_string(opts.mode)},
                 {"range", {{"start", range.start}, {"stop", range.stop}, {"step", range.step}}},
                 {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)},
                 {"seed", c.seed}};
  const json doc = {{"command", "sweep"}, {"config", config}, {"result", json::parse(sweep_json(result))}};
  const fs::path dir = c.output_dir;
  write_text(dir / "sweep.json", doc.dump(2) + "\n");
  write_metadata(dir, "sweep", c.seed, started, t0);
  return kOk;
}

struct PredictOptions {
  std::string model;
  std::string text;
  std::string id = "query";
  std::string input;
  std::string candidates_corpus;
  std::optional<std::size_t> top_k;
  std::string export_dir;
};

std::vector<Bioassay> read_queries(const PredictOptions& p) {
  std::vector<Bioassay> out;
  if (!p.text.empty()) {
    out.push_back({p.id, p.text});
  }
  if (!p.input.empty()) {
    std::ifstream in(p.input);
    if (!in) {
      throw IoError("cannot open " + p.input);
    }
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto where = p.input + ":" + std::to_string(n);
      try {
        const auto j = json::parse(line);
        const auto& id = j.at("id");
        out.push_back({id.is_number() ? id.dump() : id.get<std::string>(),
                       j.at("description").get<std::string>()});
      } catch (const json::exception& e) {
        throw ParseError(e.what(), where);
      }
    }
  }
  if (out.empty()) {
    throw UsageError("nothing to predict: pass --text or --input");
  }
  return out;
}

std::vector<SemanticStatement> candidates_for(const Scorer& model, const PredictOptions& p,
                                              const RunConfig& c) {
  if (!p.candidates_corpus.empty()) {
    CorpusOptions o = c.corpus;
    o.path = p.candidates_corpus;
    const auto corpus = load(o);
    const auto s = corpus.vocabulary().statements();
    return {s.begin(), s.end()};
  }
  std::vector<SemanticStatement> out;
  if (const auto* f = dynamic_cast<const FrequencyModel*>(&model)) {
    for (const auto& e : f->ranking()) out.push_back(e.statement);
  } else if (const auto* l = dynamic_cast<const LexicalModel*>(&model)) {
    for (const auto& k : l->known_statements()) out.push_back(k.statement);
  } else {
    throw UsageError("this model carries no vocabulary; pass --corpus for candidate statements");
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_predict(const RunConfig& c, const PredictOptions& p, std::ostream& out, std::ostream& err) {
  const auto model = load_model_file(p.model);
  const auto queries = read_queries(p);
  const auto candidates = candidates_for(*model, p, c);
  const double threshold = c.threshold.value_or(model->default_threshold());

  out << "assay\trank\tscore\tpredicate\tobject\n";
  for (const auto& q : queries) {
    const auto t0 = Clock::now();
    const auto ranked = rank_statements(*model, q, candidates);
    std::vector<SemanticStatement> chosen;
    for (const auto& r : ranked) {
      if (p.top_k ? chosen.size() >= *p.top_k : r.score < threshold) break;
      chosen.push_back(r.statement);
      out << q.id << '\t' << chosen.size() << '\t' << fixed(r.score, 6) << '\t'
          << r.statement.predicate << '\t' << r.statement.object << '\n';
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    err << q.id << ": semantified in " << fixed(seconds, 3) << " s (reference "
        << fixed(kReferenceSecondsPerAssay, 0) << " s per assay)\n";
    if (!p.export_dir.empty()) {
      const auto path = fs::path(p.export_dir) / (safe_file_stem(q.id) + ".triples.tsv");
      fs::create_directories(p.export_dir);
      write_triples_file(export_triples(q.id, chosen, Provenance::predicted), path);
    }
  }
  return kOk;
}

int cmd_export(const RunConfig& c, const std::vector<std::string>& ids, std::ostream& out) {
  const auto corpus = load(c.corpus);
  if (c.output_dir.empty()) {
    throw UsageError("--output-dir is required");
  }
  std::vector<std::size_t> positions;
  if (ids.empty()) {
    for (std::size_t i = 0; i < corpus.size(); ++i) positions.push_back(i);
  } else {
    for (const auto& id : ids) {
      const auto pos = corpus.find(id);
      if (!pos) throw ValidationError("assay " + id + " is not in " + c.corpus.path);
      positions.push_back(*pos);
    }
  }
  fs::create_directories(c.output_dir);
  for (auto i : positions) {
    std::vector<SemanticStatement> statements;
    for (auto id : corpus[i].statements) statements.push_back(corpus.statement(id));
    const auto set = export_triples(corpus[i].assay.id, statements, Provenance::gold);
    const auto path = fs::path(c.output_dir) / (safe_file_stem(set.assay_id()) + ".triples.tsv");
    write_triples_file(set, path);
    out << set.assay_id() << '\t' << set.size() << '\t' << path.string() << '\n';
  }
  return kOk;
}

int cmd_compare(const std::vector<std::string>& files, bool as_json, std::ostream& out) {
  std::vector<TripleSet> sets;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw IoError("cannot open " + f);
    auto set = read_triples(in, f);
    if (set.assay_id().empty()) throw ValidationError(f + " holds no triples");
    sets.push_back(std::move(set));
  }
  const auto table = compare_assays(sets);
  out << (as_json ? comparison_json(table) + "\n" : render_comparison_text(table));
  return kOk;
}

int cmd_export_pairs(const RunConfig& c, const std::string& output, const std::string& vocab_out,
                     std::ostream& out) {
  const auto corpus = load(c.corpus);
  const auto pairs = build_training_set(corpus, sampling_of(c, derive_seed(c.seed, "train-sampling")));
  std::ostringstream buf;
  write_pairs_jsonl(buf, pairs);
  write_text(output, buf.str());
  if (!vocab_out.empty()) {
    std::ostringstream v;
    write_vocabulary_jsonl(v, corpus.vocabulary());
    write_text(vocab_out, v.str());
  }
  out << pairs.size() << " pairs\t" << output << '\n';
  return kOk;
}

int cmd_synth(const SyntheticCorpusSpec& spec, const std::string& output, std::ostream& out) {
  const auto corpus = make_synthetic_corpus(spec);
  std::ostringstream buf;
  write_corpus_jsonl(buf, corpus);
  write_text(output, buf.str());
  out << corpus.size() << " assays\t" << output << '\n';
  return kOk;
}

CurationServer* g_server = nullptr;

extern "C" void stop_server(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const RunConfig& c, const std::string& model_path, const std::string& host, int port,
              std::ostream& out) {
  const auto corpus = load(c.corpus);
  std::unique_ptr<Scorer> model;
  if (!model_path.empty()) {
    model = load_model_file(model_path);
  } else {
    const auto sampling = sampling_of(c, derive_seed(c.seed, "train-sampling"));
    const auto pairs = build_training_set(corpus, sampling);
    model = factory_of(c.scorer, c.seed)();
    model->train({corpus, pairs, sampling});
  }
  CurationServer server(corpus, *model);
  const int bound = server.bind(host, port);
  out << "curation backend on http://" << host << ":" << bound << " (" << corpus.size()
      << " assays, " << model->kind() << " scorer)" << std::endl;
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  server.listen();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic statement prediction for bioassay descriptions", "semantify"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SEMANTIFY_VERSION);

  RunConfig cfg;

  auto* stats = app.add_subcommand("stats", "Corpus statistics and length histogram");
  std::string stats_output;
  add_corpus_options(stats, cfg.corpus);
  add_seed(stats, cfg);
  stats->add_option("--output", stats_output, "Also write the report as JSON");

  auto* train = app.add_subcommand("train", "Train a scorer on the whole corpus");
  std::string model_out;
  add_corpus_options(train, cfg.corpus);
  add_scorer_options(train, cfg.scorer);
  add_sampling_options(train, cfg);
  add_seed(train, cfg);
  train->add_option("--model-out", model_out, "Model file to write")->required();

  auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validation");
  std::string plot;
  add_corpus_options(evaluate, cfg.corpus);
  add_scorer_options(evaluate, cfg.scorer);
  add_sampling_options(evaluate, cfg);
  add_threshold(evaluate, cfg);
  add_seed(evaluate, cfg);
  evaluate->add_option("--folds", cfg.folds, "Number of folds")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  evaluate->add_option("--mode", cfg.mode, "Evaluation universe")
      ->check(CLI::IsMember({"both", "sampled-pair", "full-vocabulary"}))
      ->capture_default_str();
  evaluate->add_option("--output-dir", cfg.output_dir, "Directory for report.json and metadata.json")
      ->required();
  evaluate->add_option("--plot", plot, "Write the hit-and-miss grid of all test assays here");
  evaluate->add_flag("--sequential", cfg.sequential, "Run folds one after another");

  auto* sweep = app.add_subcommand("sweep", "Sweep the number of negatives per assay");
  SweepRange range;
  bool sweep_cv = false;
  std::string sweep_mode = "sampled-pair";
  add_corpus_options(sweep, cfg.corpus);
  add_scorer_options(sweep, cfg.scorer);
  add_threshold(sweep, cfg);
  add_seed(sweep, cfg);
  sweep->add_option("--start", range.start, "First value")->capture_default_str();
  sweep->add_option("--stop", range.stop, "Last value (inclusive)")->capture_default_str();
  sweep->add_option("--step", range.step, "Increment")->capture_default_str();
  sweep->add_option("--folds", cfg.folds, "Number of folds")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  sweep->add_option("--mode", sweep_mode, "Evaluation universe")
      ->check(CLI::IsMember({"sampled-pair", "full-vocabulary"}))
      ->capture_default_str();
  sweep->add_flag("--cv", sweep_cv, "Average every point over all folds instead of the first");
  sweep->add_option("--output-dir", cfg.output_dir, "Directory for sweep.json and metadata.json")
      ->required();

  auto* predict = app.add_subcommand("predict", "Rank statements for new assay descriptions");
  PredictOptions pred;
  predict->add_option("--model", pred.model, "Model file from `train`")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--text", pred.text, "Assay description");
  predict->add_option("--id", pred.id, "Assay id for --text")->capture_default_str();
  predict->add_option("--input", pred.input, "JSONL of {id, description}")->check(CLI::ExistingFile);
  predict->add_option("--corpus", pred.candidates_corpus, "Candidate statements from this corpus")
      ->check(CLI::ExistingFile);
  predict->add_option("--top-k", pred.top_k, "Print exactly the K best statements")
      ->check(CLI::PositiveNumber);
  add_threshold(predict, cfg);
  add_seed(predict, cfg);
  predict->add_option("--export", pred.export_dir, "Write <id>.triples.tsv files here");

  auto* export_cmd = app.add_subcommand("export", "Write gold annotations as triple files");
  std::vector<std::string> export_ids;
  add_corpus_options(export_cmd, cfg.corpus);
  add_seed(export_cmd, cfg);
  export_cmd->add_option("--assay", export_ids, "Only these assay ids");
  export_cmd->add_option("--output-dir", cfg.output_dir, "Destination directory")->required();

  auto* compare = app.add_subcommand("compare", "Tabulate triple files side by side");
  std::vector<std::string> compare_files;
  bool compare_json = false;
  compare->add_option("files", compare_files, "Triple files (two or more)")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_flag("--json", compare_json, "JSON instead of a text table");
  add_seed(compare, cfg);

  auto* pairs = app.add_subcommand("export-pairs", "Write the labeled training pairs");
  std::string pairs_out, vocab_out;
  add_corpus_options(pairs, cfg.corpus);
  add_sampling_options(pairs, cfg);
  add_seed(pairs, cfg);
  pairs->add_option("--output", pairs_out, "Pairs JSONL")->required();
  pairs->add_option("--vocabulary", vocab_out, "Also write the statement vocabulary JSONL");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  SyntheticCorpusSpec spec;
  std::string synth_out;
  synth->add_option("--assays", spec.assays, "Number of assays")->capture_default_str();
  synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  synth->add_option("--output", synth_out, "JSONL destination")->required();

  auto* serve = app.add_subcommand("serve", "Curation backend for the review UI");
  std::string serve_model, host = "127.0.0.1";
  int port = 8600;
  add_corpus_options(serve, cfg.corpus);
  add_scorer_options(serve, cfg.scorer);
  add_sampling_options(serve, cfg);
  add_seed(serve, cfg);
  serve->add_option("--model", serve_model, "Model file (otherwise trained on --corpus)")
      ->check(CLI::ExistingFile);
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--port", port, "Listen port (0 picks one)")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*stats) return cmd_stats(cfg, stats_output, out);
    if (*train) return cmd_train(cfg, model_out, out);
    if (*evaluate) return cmd_evaluate(cfg, plot, out);
    if (*sweep) {
      cfg.mode = sweep_mode;
      return cmd_sweep(cfg, range, sweep_cv, out);
    }
    if (*predict) return cmd_predict(cfg, pred, out, err);
    if (*export_cmd) return cmd_export(cfg, export_ids, out);
    if (*compare) return cmd_compare(compare_files, compare_json, out);
    if (*pairs) return cmd_export_pairs(cfg, pairs_out, vocab_out, out);
    if (*synth) return cmd_synth(spec, synth_out, out);
    if (*serve) return cmd_serve(cfg, serve_model, host, port, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const RemoteError& e) {
    err << "inference service error: " << e.what() << '\n';
    return kRemoteError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kDataError;
  } catch (const ValidationError& e) {
    err << "invalid data: " << e.what() << '\n';
    return kDataError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace semantify::cli
