#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semantify/corpus.hpp"
#include "semantify/pairgen.hpp"
#include "semantify/scoring.hpp"

namespace semantify {

enum class EvaluationMode {
  // Gold positives plus `false_per_assay` sampled negatives per test assay.
  sampled_pairs,
  // Every vocabulary statement is a candidate for every test assay.
  full_vocabulary,
};

std::string to_string(EvaluationMode mode);
EvaluationMode parse_evaluation_mode(std::string_view name);

struct ConfusionCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t true_negatives = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;
};

struct MetricsReport {
  ConfusionCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the corresponding ratio had a zero denominator and was defined as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
  EvaluationMode mode = EvaluationMode::sampled_pairs;
};

// Micro-averaged metrics from pooled counts.
MetricsReport metrics_from_counts(const ConfusionCounts& counts, EvaluationMode mode);

// Evaluation universe for one test assay: gold statements first, then the
// sampled negatives (sampled mode) or the rest of the vocabulary (full mode).
std::vector<StatementId> evaluation_universe(const Corpus& test, std::size_t position,
                                             EvaluationMode mode, const SamplingConfig& sampling);

// Throws ValidationError when any test assay id is among the scorer's
// training assays, UsageError when the scorer is untrained.
MetricsReport evaluate_pairs(const Scorer& model, const Corpus& test, EvaluationMode mode,
                             const SamplingConfig& sampling, double threshold);

struct CrossValidationOptions {
  std::size_t folds = 3;
  SamplingConfig sampling;
  // Scorer default when unset.
  std::optional<double> threshold;
  EvaluationMode mode = EvaluationMode::sampled_pairs;
  std::uint64_t seed = 0;
  bool parallel = true;
};

struct FoldResult {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double threshold = 0.0;
  MetricsReport report;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  // Unweighted means of the per-fold values.
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
};

// Sub-seeds used by cross_validate, exposed so callers can replay a fold.
struct RunSeeds {
  std::uint64_t folds;
  std::uint64_t train_sampling;
  std::uint64_t eval_sampling;
};
RunSeeds derive_run_seeds(std::uint64_t seed);

CrossValidationResult summarize_folds(std::vector<FoldResult> folds);

CrossValidationResult cross_validate(const Corpus& corpus, const ScorerFactory& factory,
                                     const CrossValidationOptions& options);

// Fresh scorer trained on `fold.train` with pairs sampled from seeds.train_sampling.
std::unique_ptr<Scorer> train_fold_scorer(const FoldCorpora& fold, const ScorerFactory& factory,
                                          const SamplingConfig& sampling, const RunSeeds& seeds);

// Evaluates a scorer trained by train_fold_scorer on `fold.test`.
FoldResult evaluate_fold(const Scorer& scorer, const FoldCorpora& fold,
                         const SamplingConfig& sampling, std::optional<double> threshold,
                         EvaluationMode mode, const RunSeeds& seeds);

// train_fold_scorer followed by evaluate_fold.
FoldResult run_fold(const FoldCorpora& fold, const ScorerFactory& factory,
                    const SamplingConfig& sampling, std::optional<double> threshold,
                    EvaluationMode mode, const RunSeeds& seeds);

struct SweepRange {
  std::size_t start = 100;
  std::size_t stop = 300;  // inclusive
  std::size_t step = 10;

  // Throws UsageError unless step > 0 and start <= stop.
  std::vector<std::size_t> points() const;
};

struct SweepPoint {
  std::size_t false_per_assay = 0;
  MetricsReport report;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // strictly increasing false_per_assay
  std::size_t best = 0;            // index of the highest F1; earliest on ties
};

struct SweepOptions {
  std::size_t folds = 3;
  // Evaluate every point on the first fold of one fixed split; with
  // cross_validated set, each point is the mean over all folds.
  bool cross_validated = false;
  std::optional<double> threshold;
  EvaluationMode mode = EvaluationMode::sampled_pairs;
  std::uint64_t seed = 0;
};

SweepResult sweep_false_labels(const Corpus& corpus, const ScorerFactory& factory,
                               const SweepRange& range, const SweepOptions& options);

// ---------------------------------------------------------------------------
// Hit-and-miss simulation

enum class Mark : char { hit = 'B', miss = 'P' };

struct HitMissTrace {
  std::string assay_id;
  std::vector<Mark> marks;

  std::size_t hits() const;
  std::size_t misses() const;
};

// Simulates an operator who repeatedly takes the top-scoring remaining
// candidate: a gold statement is a hit, anything else a miss; stops once every
// gold statement is found. Throws ValidationError when a gold statement is not
// among the candidates.
HitMissTrace hit_and_miss(const Scorer& model, const Bioassay& assay,
                          std::span<const StatementId> gold, const StatementVocabulary& vocabulary,
                          std::span<const StatementId> candidates);

// One trace per test assay against the full vocabulary.
std::vector<HitMissTrace> hit_and_miss_all(const Scorer& model, const Corpus& test,
                                           bool parallel = true);

// Grid text: "columns\t<W>\trows\t<R>" then one "<assay_id>\t<symbols>" line per
// trace, sorted by trace length then id; symbols B (hit), P (miss), W (blank).
void write_plot_grid(std::ostream& out, std::span<const HitMissTrace> traces);
// Throws UsageError on empty input, IoError when the file cannot be written.
void emit_plot_data(std::span<const HitMissTrace> traces, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Report serialization (stable key order, fixed float formatting)

std::string report_json(const MetricsReport& report);
std::string cross_validation_json(const CrossValidationResult& result);
std::string sweep_json(const SweepResult& result);

}  // namespace semantify
