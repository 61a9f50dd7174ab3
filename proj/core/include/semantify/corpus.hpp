#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semantify {

// Dense index of a statement within a vocabulary.
enum class StatementId : std::uint32_t {};

constexpr std::uint32_t to_index(StatementId id) noexcept { return static_cast<std::uint32_t>(id); }

// A predicate -> object pair; the subject is always the assay itself.
// Construct through make_statement so both fields are canonical.
struct SemanticStatement {
  std::string predicate;
  std::string object;

  auto operator<=>(const SemanticStatement&) const = default;
};

// Canonicalizes (trim, collapse whitespace, keep case). Throws
// ValidationError if either field is empty afterwards.
SemanticStatement make_statement(std::string_view predicate, std::string_view object);

struct Bioassay {
  std::string id;
  std::string description;

  bool operator==(const Bioassay&) const = default;
};

// An assay together with its gold annotation sequence. Statements keep file
// order for display and never repeat.
struct AnnotatedAssay {
  Bioassay assay;
  std::vector<StatementId> statements;

  std::size_t length() const noexcept { return statements.size(); }
  bool contains(StatementId id) const;
};

// Indexed statement set with per-statement assay frequency. Several corpora
// (a full corpus and its fold subsets) may share one statement table; each
// keeps its own frequency counts.
class StatementVocabulary {
 public:
  StatementVocabulary();

  std::size_t size() const noexcept { return table_->statements.size(); }
  bool empty() const noexcept { return size() == 0; }

  const SemanticStatement& at(StatementId id) const;
  std::optional<StatementId> find(const SemanticStatement& s) const;
  std::size_t frequency(StatementId id) const { return frequency_.at(to_index(id)); }
  std::span<const std::size_t> frequencies() const noexcept { return frequency_; }
  std::span<const SemanticStatement> statements() const noexcept { return table_->statements; }

  bool same_table(const StatementVocabulary& other) const noexcept { return table_ == other.table_; }

 private:
  friend class CorpusBuilder;
  friend class Corpus;

  struct Table {
    std::vector<SemanticStatement> statements;
    std::map<SemanticStatement, StatementId> index;
  };

  StatementId intern(const SemanticStatement& s);
  void recount(std::span<const AnnotatedAssay> assays);

  std::shared_ptr<Table> table_;
  std::vector<std::size_t> frequency_;
};

struct LoadDiagnostics {
  std::size_t duplicate_statements_collapsed = 0;
  std::size_t assays_dropped_empty = 0;
  std::size_t statements_removed = 0;
};

// Immutable validated corpus. Cheap to share read-only between threads.
class Corpus {
 public:
  Corpus() = default;

  std::size_t size() const noexcept { return assays_.size(); }
  bool empty() const noexcept { return assays_.empty(); }
  std::span<const AnnotatedAssay> assays() const noexcept { return assays_; }
  const AnnotatedAssay& operator[](std::size_t i) const { return assays_.at(i); }
  const StatementVocabulary& vocabulary() const noexcept { return vocabulary_; }
  const LoadDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  std::optional<std::size_t> find(std::string_view assay_id) const;
  const SemanticStatement& statement(StatementId id) const { return vocabulary_.at(id); }

  // Corpus over the given assay positions that shares this corpus's statement
  // table; frequencies are recounted over the subset.
  Corpus subset(std::span<const std::size_t> positions) const;

  // Semantic equality: same assays in the same order with the same statement
  // sets (by content, not index).
  bool equivalent(const Corpus& other) const;

 private:
  friend class CorpusBuilder;

  std::vector<AnnotatedAssay> assays_;
  StatementVocabulary vocabulary_;
  std::unordered_map<std::string, std::size_t> by_id_;
  LoadDiagnostics diagnostics_;
};

// Accumulates assays and validates on build().
class CorpusBuilder {
 public:
  CorpusBuilder() = default;
  // Reuse an existing statement table so ids stay comparable.
  explicit CorpusBuilder(const StatementVocabulary& shared);

  // `locator` prefixes validation messages. Duplicate statements are collapsed
  // and counted; an empty description throws ValidationError.
  CorpusBuilder& add(Bioassay assay, std::span<const SemanticStatement> statements,
                     std::string_view locator = {});

  // Throws ValidationError on duplicate ids or an assay without statements.
  Corpus build() &&;

  LoadDiagnostics& diagnostics() noexcept { return diagnostics_; }

 private:
  std::vector<AnnotatedAssay> assays_;
  StatementVocabulary vocabulary_;
  LoadDiagnostics diagnostics_;
};

// ---------------------------------------------------------------------------
// Filtering

struct FilterPolicy {
  std::vector<SemanticStatement> stop_statements;
  std::vector<std::string> stop_predicates;
  std::vector<std::string> stop_objects;
  // Drop statements present in more than this fraction of assays. Off when unset.
  std::optional<double> ubiquity_threshold;

  bool empty() const noexcept {
    return stop_statements.empty() && stop_predicates.empty() && stop_objects.empty() &&
           !ubiquity_threshold;
  }
};

// Returns a corpus with a freshly indexed vocabulary lacking every statement the
// policy matches. Assays left with no statements are dropped and counted in
// diagnostics().assays_dropped_empty.
Corpus filter_noninformative(const Corpus& corpus, const FilterPolicy& policy);

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
  std::size_t assay_count = 0;
  std::size_t vocabulary_size = 0;
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  double mean_length = 0.0;
  std::size_t total_annotations = 0;
  std::map<std::size_t, std::size_t> length_histogram;
};

// Throws UsageError on an empty corpus. vocabulary_size counts statements with
// non-zero frequency, so it is meaningful for fold subsets too.
CorpusStats corpus_stats(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Cross-validation folds

struct FoldSplit {
  std::vector<std::size_t> train_positions;
  std::vector<std::size_t> test_positions;
};

// Seeded shuffle of assay positions, then round-robin deal into `folds` test
// sets. Fold i trains on the complement of test set i. Throws UsageError when
// folds < 2 or the corpus has fewer than `folds` assays.
std::vector<FoldSplit> split_folds(const Corpus& corpus, std::size_t folds, std::uint64_t seed);

struct FoldCorpora {
  Corpus train;
  Corpus test;
};

std::vector<FoldCorpora> materialize_folds(const Corpus& corpus, std::span<const FoldSplit> splits);

}  // namespace semantify
