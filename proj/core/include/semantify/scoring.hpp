#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "semantify/corpus.hpp"
#include "semantify/pairgen.hpp"

namespace semantify {

// Everything a scorer may look at while training. The corpus is the training
// split only; evaluation code checks that later test assays are disjoint from it.
struct TrainingData {
  const Corpus& corpus;
  std::span<const LabeledPair> pairs;
  SamplingConfig sampling;
};

struct Score {
  double value = 0.0;
  // The statement was not part of the training vocabulary; value is 0.
  bool unknown_statement = false;
};

// Uniform contract over the native scorers and the remote neural scorer.
// A trained scorer is immutable and may be shared between threads.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::string kind() const = 0;
  virtual void train(const TrainingData& data) = 0;
  virtual bool trained() const = 0;

  // Deterministic value in [0, 1]. Throws UsageError when untrained.
  virtual Score score(const Bioassay& assay, const SemanticStatement& statement) const = 0;

  // One score per statement, in order. Overridden where batching pays off.
  virtual std::vector<Score> score_batch(const Bioassay& assay,
                                         std::span<const SemanticStatement> statements) const;

  // Threshold used when the caller does not pass one.
  virtual double default_threshold() const { return 0.5; }

  // Throws UsageError for scorers without a file representation.
  virtual void save(std::ostream& out) const;

  const std::vector<std::string>& training_assays() const noexcept { return training_assays_; }

 protected:
  void record_training_assays(const Corpus& corpus);
  void set_training_assays(std::vector<std::string> ids);
  void require_trained() const;

 private:
  std::vector<std::string> training_assays_;  // sorted
};

using ScorerFactory = std::function<std::unique_ptr<Scorer>()>;

// {s in candidates : score(s) >= threshold}, in candidate order.
std::vector<SemanticStatement> predict(const Scorer& model, const Bioassay& assay,
                                       std::span<const SemanticStatement> candidates,
                                       double threshold);

struct RankedStatement {
  SemanticStatement statement;
  double score = 0.0;
};

// Descending score; ties by ascending statement_text, then by (predicate, object).
std::vector<RankedStatement> rank_statements(const Scorer& model, const Bioassay& assay,
                                             std::span<const SemanticStatement> candidates);

struct RankedId {
  StatementId id{};
  double score = 0.0;
};

// Same ordering as rank_statements over vocabulary ids.
std::vector<RankedId> rank_ids(const Scorer& model, const Bioassay& assay,
                               const StatementVocabulary& vocabulary,
                               std::span<const StatementId> candidates);

// Strict-weak ordering used by both ranking functions.
bool ranks_before(const SemanticStatement& a, double score_a, const SemanticStatement& b,
                  double score_b);

// ---------------------------------------------------------------------------

// Assay-independent baseline: score(s) = freq(s) / max_freq over the training
// assays. Pairs are classified true iff the statement's rank is within the
// fitted decision rank K (ties at the K-th score are included).
class FrequencyModel final : public Scorer {
 public:
  struct Entry {
    SemanticStatement statement;
    std::size_t frequency = 0;
  };

  FrequencyModel() = default;

  std::string kind() const override { return "frequency"; }
  // Fits K to maximize pair F1 on data.pairs; with no pairs K falls back to the
  // rounded mean annotation length.
  void train(const TrainingData& data) override;
  bool trained() const override { return trained_; }
  Score score(const Bioassay& assay, const SemanticStatement& statement) const override;
  double default_threshold() const override { return cutoff_; }
  void save(std::ostream& out) const override;

  std::size_t frequency(const SemanticStatement& statement) const;
  std::size_t max_frequency() const noexcept { return max_frequency_; }
  std::size_t decision_rank() const noexcept { return decision_rank_; }
  // Statements in rank order (descending frequency, documented tie-break).
  const std::vector<Entry>& ranking() const noexcept { return ranking_; }

  static FrequencyModel from_entries(std::vector<Entry> entries, std::size_t decision_rank,
                                     std::vector<std::string> training_assays);

 private:
  void index_entries(std::vector<Entry> entries);
  void set_decision_rank(std::size_t k);

  bool trained_ = false;
  std::vector<Entry> ranking_;
  std::map<SemanticStatement, std::size_t> frequency_;
  std::size_t max_frequency_ = 0;
  std::size_t decision_rank_ = 0;
  double cutoff_ = 1.0;
};

struct LexicalHyperparams {
  std::size_t epochs = 8;
  double learning_rate = 0.05;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

// Logistic model over token-overlap features of (assay text, statement text)
// plus a statement-frequency prior. Weights start at zero, so an untouched
// model scores 0.5 everywhere. Training keeps the bias non-positive and the
// prior weight non-negative; with the prior feature shifted into [-1, 0], a
// pair without shared tokens never scores above 0.5.
class LexicalModel final : public Scorer {
 public:
  static constexpr std::size_t kFeatureCount = 4;
  using Weights = std::array<double, kFeatureCount>;

  explicit LexicalModel(LexicalHyperparams hyperparams = {}) : hyperparams_(hyperparams) {}

  std::string kind() const override { return "lexical"; }
  void train(const TrainingData& data) override;
  bool trained() const override { return trained_; }
  Score score(const Bioassay& assay, const SemanticStatement& statement) const override;
  std::vector<Score> score_batch(const Bioassay& assay,
                                 std::span<const SemanticStatement> statements) const override;
  void save(std::ostream& out) const override;

  const Weights& weights() const noexcept { return weights_; }
  const LexicalHyperparams& hyperparams() const noexcept { return hyperparams_; }

  // Feature vector for a tokenized pair: bias, log(1 + shared tokens), shared
  // fraction of statement tokens, frequency prior minus one.
  static Weights features(std::span<const std::string> assay_tokens_sorted,
                          std::span<const std::string> statement_tokens_sorted, double prior);

  struct KnownStatement {
    SemanticStatement statement;
    double prior = 0.0;
  };
  static LexicalModel from_state(LexicalHyperparams hyperparams, Weights weights,
                                 std::vector<KnownStatement> known,
                                 std::vector<std::string> training_assays);
  std::vector<KnownStatement> known_statements() const;

 private:
  struct StatementInfo {
    std::vector<std::string> tokens;  // sorted, unique
    double prior = 0.0;
  };

  void index_statements(std::vector<KnownStatement> known);
  double probability(std::span<const std::string> assay_tokens, const StatementInfo& info) const;

  LexicalHyperparams hyperparams_;
  Weights weights_{};
  bool trained_ = false;
  std::map<SemanticStatement, StatementInfo> statements_;
};

// Reads a versioned model file written by Scorer::save. Throws ParseError for
// malformed files or unknown versions.
std::unique_ptr<Scorer> load_model(std::istream& in);
std::unique_ptr<Scorer> load_model_file(const std::filesystem::path& path);
void save_model_file(const Scorer& model, const std::filesystem::path& path);

inline constexpr int kModelFormatVersion = 1;

}  // namespace semantify
