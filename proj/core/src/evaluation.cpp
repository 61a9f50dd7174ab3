#include "semantify/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "semantify/error.hpp"
#include "semantify/random.hpp"

namespace semantify {

std::string to_string(EvaluationMode mode) {
  return mode == EvaluationMode::sampled_pairs ? "sampled-pair" : "full-vocabulary";
}

EvaluationMode parse_evaluation_mode(std::string_view name) {
  if (name == "sampled-pair" || name == "sampled") {
    return EvaluationMode::sampled_pairs;
  }
  if (name == "full-vocabulary" || name == "full") {
    return EvaluationMode::full_vocabulary;
  }
  throw UsageError("unknown evaluation mode \"" + std::string(name) + "\"");
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  true_positives += other.true_positives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  true_negatives += other.true_negatives;
  return *this;
}

MetricsReport metrics_from_counts(const ConfusionCounts& counts, EvaluationMode mode) {
  MetricsReport r;
  r.counts = counts;
  r.mode = mode;
  const auto tp = static_cast<double>(counts.true_positives);
  const auto predicted = counts.true_positives + counts.false_positives;
  const auto actual = counts.true_positives + counts.false_negatives;
  r.precision_undefined = predicted == 0;
  r.recall_undefined = actual == 0;
  r.precision = r.precision_undefined ? 0.0 : tp / static_cast<double>(predicted);
  r.recall = r.recall_undefined ? 0.0 : tp / static_cast<double>(actual);
  r.f1_undefined = r.precision + r.recall == 0.0;
  r.f1 = r.f1_undefined ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::vector<StatementId> evaluation_universe(const Corpus& test, std::size_t position,
                                             EvaluationMode mode, const SamplingConfig& sampling) {
  const auto& assay = test[position];
  std::vector<StatementId> universe(assay.statements.begin(), assay.statements.end());
  if (mode == EvaluationMode::sampled_pairs) {
    const auto negatives = sample_negatives_for(test, position, sampling);
    universe.insert(universe.end(), negatives.begin(), negatives.end());
    return universe;
  }
  const auto n = test.vocabulary().size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<StatementId>(i);
    if (!assay.contains(id)) {
      universe.push_back(id);
    }
  }
  return universe;
}

MetricsReport evaluate_pairs(const Scorer& model, const Corpus& test, EvaluationMode mode,
                             const SamplingConfig& sampling, double threshold) {
  if (!model.trained()) {
    throw UsageError("evaluate_pairs: scorer \"" + model.kind() + "\" is untrained");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw UsageError("threshold must lie in [0, 1]");
  }
  const auto& trained_on = model.training_assays();
  for (const auto& a : test.assays()) {
    if (std::binary_search(trained_on.begin(), trained_on.end(), a.assay.id)) {
      throw ValidationError("test assay " + a.assay.id + " was part of the scorer's training data");
    }
  }

  ConfusionCounts counts;
  std::vector<SemanticStatement> statements;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& assay = test[i];
    const auto universe = evaluation_universe(test, i, mode, sampling);
    statements.clear();
    for (auto id : universe) {
      statements.push_back(test.statement(id));
    }
    const auto scores = model.score_batch(assay.assay, statements);
    const auto k = assay.length();
    for (std::size_t j = 0; j < universe.size(); ++j) {
      const bool predicted = scores[j].value >= threshold;
      if (j < k) {
        (predicted ? counts.true_positives : counts.false_negatives) += 1;
      } else {
        (predicted ? counts.false_positives : counts.true_negatives) += 1;
      }
    }
  }
  return metrics_from_counts(counts, mode);
}

// ---------------------------------------------------------------------------

RunSeeds derive_run_seeds(std::uint64_t seed) {
  return {derive_seed(seed, "folds"), derive_seed(seed, "train-sampling"),
          derive_seed(seed, "eval-sampling")};
}

std::unique_ptr<Scorer> train_fold_scorer(const FoldCorpora& fold, const ScorerFactory& factory,
                                          const SamplingConfig& sampling, const RunSeeds& seeds) {
  SamplingConfig train_cfg = sampling;
  train_cfg.seed = seeds.train_sampling;
  const auto pairs = build_training_set(fold.train, train_cfg);
  auto scorer = factory();
  scorer->train({fold.train, pairs, train_cfg});
  return scorer;
}

FoldResult evaluate_fold(const Scorer& scorer, const FoldCorpora& fold,
                         const SamplingConfig& sampling, std::optional<double> threshold,
                         EvaluationMode mode, const RunSeeds& seeds) {
  SamplingConfig eval_cfg = sampling;
  eval_cfg.seed = seeds.eval_sampling;
  FoldResult result;
  result.train_size = fold.train.size();
  result.test_size = fold.test.size();
  result.threshold = threshold.value_or(scorer.default_threshold());
  result.report = evaluate_pairs(scorer, fold.test, mode, eval_cfg, result.threshold);
  return result;
}

FoldResult run_fold(const FoldCorpora& fold, const ScorerFactory& factory,
                    const SamplingConfig& sampling, std::optional<double> threshold,
                    EvaluationMode mode, const RunSeeds& seeds) {
  const auto scorer = train_fold_scorer(fold, factory, sampling, seeds);
  return evaluate_fold(*scorer, fold, sampling, threshold, mode, seeds);
}

CrossValidationResult summarize_folds(std::vector<FoldResult> folds) {
  CrossValidationResult out;
  out.folds = std::move(folds);
  if (out.folds.empty()) {
    return out;
  }
  for (const auto& f : out.folds) {
    out.mean_precision += f.report.precision;
    out.mean_recall += f.report.recall;
    out.mean_f1 += f.report.f1;
  }
  const auto n = static_cast<double>(out.folds.size());
  out.mean_precision /= n;
  out.mean_recall /= n;
  out.mean_f1 /= n;
  return out;
}

namespace {

std::vector<FoldResult> run_all_folds(const std::vector<FoldCorpora>& folds,
                                      const ScorerFactory& factory, const SamplingConfig& sampling,
                                      std::optional<double> threshold, EvaluationMode mode,
                                      const RunSeeds& seeds, bool parallel) {
  std::vector<FoldResult> results;
  results.reserve(folds.size());
  if (!parallel) {
    for (const auto& f : folds) {
      results.push_back(run_fold(f, factory, sampling, threshold, mode, seeds));
    }
    return results;
  }
  std::vector<std::future<FoldResult>> pending;
  pending.reserve(folds.size());
  for (const auto& f : folds) {
    pending.push_back(std::async(std::launch::async, [&, fp = &f] {
      return run_fold(*fp, factory, sampling, threshold, mode, seeds);
    }));
  }
  for (auto& p : pending) {
    results.push_back(p.get());
  }
  return results;
}

}  // namespace

CrossValidationResult cross_validate(const Corpus& corpus, const ScorerFactory& factory,
                                     const CrossValidationOptions& options) {
  const auto seeds = derive_run_seeds(options.seed);
  const auto splits = split_folds(corpus, options.folds, seeds.folds);
  const auto folds = materialize_folds(corpus, splits);
  return summarize_folds(run_all_folds(folds, factory, options.sampling, options.threshold,
                                       options.mode, seeds, options.parallel));
}

std::vector<std::size_t> SweepRange::points() const {
  if (step == 0) {
    throw UsageError("sweep step must be positive");
  }
  if (start > stop) {
    throw UsageError("sweep start must not exceed stop");
  }
  std::vector<std::size_t> out;
  for (auto v = start; v <= stop; v += step) {
    out.push_back(v);
  }
  return out;
}

SweepResult sweep_false_labels(const Corpus& corpus, const ScorerFactory& factory,
                               const SweepRange& range, const SweepOptions& options) {
  const auto points = range.points();
  const auto seeds = derive_run_seeds(options.seed);
  const auto splits = split_folds(corpus, options.folds, seeds.folds);
  auto folds = materialize_folds(corpus, splits);
  if (!options.cross_validated) {
    folds.resize(1);
  }

  SweepResult result;
  for (auto f : points) {
    SamplingConfig sampling;
    sampling.false_per_assay = f;
    auto fold_results =
        run_all_folds(folds, factory, sampling, options.threshold, options.mode, seeds, true);
    MetricsReport report;
    if (fold_results.size() == 1) {
      report = fold_results.front().report;
    } else {
      // Pooled counts; ratios are unweighted fold means.
      ConfusionCounts pooled;
      for (const auto& fr : fold_results) {
        pooled += fr.report.counts;
      }
      const auto cv = summarize_folds(std::move(fold_results));
      report = metrics_from_counts(pooled, options.mode);
      report.precision = cv.mean_precision;
      report.recall = cv.mean_recall;
      report.f1 = cv.mean_f1;
    }
    result.points.push_back({f, report});
  }
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    if (result.points[i].report.f1 > result.points[result.best].report.f1) {
      result.best = i;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

std::size_t HitMissTrace::hits() const {
  return static_cast<std::size_t>(std::count(marks.begin(), marks.end(), Mark::hit));
}

std::size_t HitMissTrace::misses() const {
  return marks.size() - hits();
}

HitMissTrace hit_and_miss(const Scorer& model, const Bioassay& assay,
                          std::span<const StatementId> gold, const StatementVocabulary& vocabulary,
                          std::span<const StatementId> candidates) {
  std::set<StatementId> remaining(gold.begin(), gold.end());
  const std::set<StatementId> pool(candidates.begin(), candidates.end());
  for (auto id : remaining) {
    if (!pool.contains(id)) {
      throw ValidationError("gold statement \"" + statement_text(vocabulary.at(id)) +
                            "\" of assay " + assay.id + " is not among the candidates");
    }
  }
  HitMissTrace trace{assay.id, {}};
  if (remaining.empty()) {
    return trace;
  }
  // Scores do not change between steps, so the repeated "take the top
  // remaining candidate" loop is a walk down one ranking.
  for (const auto& r : rank_ids(model, assay, vocabulary, candidates)) {
    if (remaining.erase(r.id) > 0) {
      trace.marks.push_back(Mark::hit);
      if (remaining.empty()) {
        break;
      }
    } else {
      trace.marks.push_back(Mark::miss);
    }
  }
  return trace;
}

std::vector<HitMissTrace> hit_and_miss_all(const Scorer& model, const Corpus& test,
                                           bool parallel) {
  std::vector<StatementId> candidates(test.vocabulary().size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i] = static_cast<StatementId>(i);
  }
  std::vector<HitMissTrace> traces(test.size());
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (auto i = begin; i < end; ++i) {
      const auto& a = test[i];
      traces[i] = hit_and_miss(model, a.assay, a.statements, test.vocabulary(), candidates);
    }
  };
  const auto workers =
      parallel ? std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                                test.size()))
               : 1;
  if (workers <= 1) {
    run_range(0, test.size());
    return traces;
  }
  std::vector<std::future<void>> pending;
  const auto per = (test.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const auto begin = w * per;
    const auto end = std::min(test.size(), begin + per);
    if (begin < end) {
      pending.push_back(std::async(std::launch::async, run_range, begin, end));
    }
  }
  for (auto& p : pending) {
    p.get();
  }
  return traces;
}

void write_plot_grid(std::ostream& out, std::span<const HitMissTrace> traces) {
  std::size_t width = 0;
  for (const auto& t : traces) {
    width = std::max(width, t.marks.size());
  }
  std::vector<const HitMissTrace*> rows;
  rows.reserve(traces.size());
  for (const auto& t : traces) {
    rows.push_back(&t);
  }
  std::sort(rows.begin(), rows.end(), [](const HitMissTrace* a, const HitMissTrace* b) {
    if (a->marks.size() != b->marks.size()) {
      return a->marks.size() < b->marks.size();
    }
    return a->assay_id < b->assay_id;
  });
  out << "columns\t" << width << "\trows\t" << rows.size() << '\n';
  for (const auto* t : rows) {
    out << t->assay_id << '\t';
    for (auto m : t->marks) {
      out << static_cast<char>(m);
    }
    out << std::string(width - t->marks.size(), 'W') << '\n';
  }
}

void emit_plot_data(std::span<const HitMissTrace> traces, const std::filesystem::path& path) {
  if (traces.empty()) {
    throw UsageError("emit_plot_data: no traces");
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write plot data to " + path.string());
  }
  write_plot_grid(out, traces);
  if (!out) {
    throw IoError("failed writing plot data to " + path.string());
  }
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json report_object(const MetricsReport& r) {
  return {{"mode", to_string(r.mode)},
          {"true_positives", r.counts.true_positives},
          {"false_positives", r.counts.false_positives},
          {"false_negatives", r.counts.false_negatives},
          {"true_negatives", r.counts.true_negatives},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"precision_undefined", r.precision_undefined},
          {"recall_undefined", r.recall_undefined},
          {"f1_undefined", r.f1_undefined}};
}

}  // namespace

std::string report_json(const MetricsReport& report) {
  return report_object(report).dump(2);
}

std::string cross_validation_json(const CrossValidationResult& result) {
  nlohmann::json folds = nlohmann::json::array();
  for (std::size_t i = 0; i < result.folds.size(); ++i) {
    const auto& f = result.folds[i];
    folds.push_back({{"fold", i + 1},
                     {"train_assays", f.train_size},
                     {"test_assays", f.test_size},
                     {"threshold", f.threshold},
                     {"metrics", report_object(f.report)}});
  }
  const nlohmann::json doc = {
      {"folds", std::move(folds)},
      {"average",
       {{"precision", result.mean_precision}, {"recall", result.mean_recall}, {"f1", result.mean_f1}}}};
  return doc.dump(2);
}

std::string sweep_json(const SweepResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    points.push_back({{"false_per_assay", p.false_per_assay}, {"metrics", report_object(p.report)}});
  }
  nlohmann::json doc = {{"points", std::move(points)}};
  if (!result.points.empty()) {
    doc["best"] = {{"false_per_assay", result.points[result.best].false_per_assay},
                   {"f1", result.points[result.best].report.f1}};
  }
  return doc.dump(2);
}

}  // namespace semantify
