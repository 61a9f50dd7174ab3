#include "semantify/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "semantify/error.hpp"
#include "semantify/random.hpp"
#include "semantify/text.hpp"

namespace semantify {

SemanticStatement make_statement(std::string_view predicate, std::string_view object) {
  SemanticStatement s{text::normalize_whitespace(predicate), text::normalize_whitespace(object)};
  if (s.predicate.empty()) {
    throw ValidationError("statement predicate is empty");
  }
  if (s.object.empty()) {
    throw ValidationError("statement object is empty (predicate \"" + s.predicate + "\")");
  }
  return s;
}

bool AnnotatedAssay::contains(StatementId id) const {
  return std::find(statements.begin(), statements.end(), id) != statements.end();
}

// ---------------------------------------------------------------------------

StatementVocabulary::StatementVocabulary() : table_(std::make_shared<Table>()) {}

const SemanticStatement& StatementVocabulary::at(StatementId id) const {
  const auto i = to_index(id);
  if (i >= table_->statements.size()) {
    throw UsageError("statement id " + std::to_string(i) + " out of range");
  }
  return table_->statements[i];
}

std::optional<StatementId> StatementVocabulary::find(const SemanticStatement& s) const {
  const auto it = table_->index.find(s);
  if (it == table_->index.end()) {
    return std::nullopt;
  }
  return it->second;
}

StatementId StatementVocabulary::intern(const SemanticStatement& s) {
  if (auto existing = find(s)) {
    return *existing;
  }
  if (table_.use_count() > 1) {
    // Copy on write: other corpora keep seeing the table they were built with.
    table_ = std::make_shared<Table>(*table_);
  }
  const auto id = static_cast<StatementId>(table_->statements.size());
  table_->statements.push_back(s);
  table_->index.emplace(s, id);
  return id;
}

void StatementVocabulary::recount(std::span<const AnnotatedAssay> assays) {
  frequency_.assign(size(), 0);
  for (const auto& a : assays) {
    for (auto id : a.statements) {
      ++frequency_[to_index(id)];
    }
  }
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> Corpus::find(std::string_view assay_id) const {
  const auto it = by_id_.find(std::string(assay_id));
  if (it == by_id_.end()) {
    return std::nullopt;
  }
  return it->second;
}

Corpus Corpus::subset(std::span<const std::size_t> positions) const {
  Corpus out;
  out.vocabulary_ = vocabulary_;
  out.assays_.reserve(positions.size());
  for (auto p : positions) {
    if (p >= assays_.size()) {
      throw UsageError("subset position " + std::to_string(p) + " out of range");
    }
    if (!out.by_id_.emplace(assays_[p].assay.id, out.assays_.size()).second) {
      throw UsageError("subset repeats assay " + assays_[p].assay.id);
    }
    out.assays_.push_back(assays_[p]);
  }
  out.vocabulary_.recount(out.assays_);
  return out;
}

bool Corpus::equivalent(const Corpus& other) const {
  if (size() != other.size()) {
    return false;
  }
  auto content = [](const Corpus& c, const AnnotatedAssay& a) {
    std::vector<SemanticStatement> out;
    out.reserve(a.statements.size());
    for (auto id : a.statements) {
      out.push_back(c.statement(id));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  for (std::size_t i = 0; i < size(); ++i) {
    if (assays_[i].assay != other.assays_[i].assay ||
        content(*this, assays_[i]) != content(other, other.assays_[i])) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

CorpusBuilder::CorpusBuilder(const StatementVocabulary& shared) : vocabulary_(shared) {}

CorpusBuilder& CorpusBuilder::add(Bioassay assay, std::span<const SemanticStatement> statements,
                                  std::string_view locator) {
  const std::string where = locator.empty() ? std::string() : std::string(locator) + ": ";
  assay.id = text::normalize_whitespace(assay.id);
  if (assay.id.empty()) {
    throw ValidationError(where + "assay id is empty");
  }
  if (text::normalize_whitespace(assay.description).empty()) {
    throw ValidationError(where + "assay " + assay.id + " has an empty description");
  }
  AnnotatedAssay entry{std::move(assay), {}};
  entry.statements.reserve(statements.size());
  for (const auto& raw : statements) {
    SemanticStatement s;
    try {
      s = make_statement(raw.predicate, raw.object);
    } catch (const ValidationError& e) {
      throw ValidationError(where + "assay " + entry.assay.id + ": " + e.what());
    }
    const auto id = vocabulary_.intern(s);
    if (entry.contains(id)) {
      ++diagnostics_.duplicate_statements_collapsed;
      continue;
    }
    entry.statements.push_back(id);
  }
  assays_.push_back(std::move(entry));
  return *this;
}

Corpus CorpusBuilder::build() && {
  Corpus out;
  for (std::size_t i = 0; i < assays_.size(); ++i) {
    const auto& a = assays_[i];
    if (a.statements.empty()) {
      throw ValidationError("assay " + a.assay.id + " has no statements");
    }
    if (!out.by_id_.emplace(a.assay.id, i).second) {
      throw ValidationError("duplicate assay id " + a.assay.id);
    }
  }
  out.assays_ = std::move(assays_);
  out.vocabulary_ = std::move(vocabulary_);
  out.vocabulary_.recount(out.assays_);
  out.diagnostics_ = diagnostics_;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool matches_stoplist(const FilterPolicy& policy, const SemanticStatement& s) {
  auto contains = [](const auto& list, const auto& value) {
    return std::find(list.begin(), list.end(), value) != list.end();
  };
  return contains(policy.stop_statements, s) || contains(policy.stop_predicates, s.predicate) ||
         contains(policy.stop_objects, s.object);
}

// One filtering pass; returns the number of statements removed.
std::size_t filter_pass(const Corpus& in, const FilterPolicy& policy, Corpus& out) {
  const auto& vocab = in.vocabulary();
  std::vector<bool> drop(vocab.size(), false);
  std::size_t removed = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto id = static_cast<StatementId>(i);
    if (vocab.frequency(id) == 0) {
      continue;
    }
    bool d = matches_stoplist(policy, vocab.at(id));
    if (!d && policy.ubiquity_threshold) {
      const double share =
          static_cast<double>(vocab.frequency(id)) / static_cast<double>(in.size());
      d = share > *policy.ubiquity_threshold;
    }
    if (d) {
      drop[i] = true;
      ++removed;
    }
  }

  CorpusBuilder builder;
  std::size_t dropped_assays = 0;
  std::vector<SemanticStatement> kept;
  for (const auto& a : in.assays()) {
    kept.clear();
    for (auto id : a.statements) {
      if (!drop[to_index(id)]) {
        kept.push_back(vocab.at(id));
      }
    }
    if (kept.empty()) {
      ++dropped_assays;
      continue;
    }
    builder.add(a.assay, kept);
  }
  auto& diag = builder.diagnostics();
  diag = in.diagnostics();
  diag.assays_dropped_empty += dropped_assays;
  diag.statements_removed += removed;
  out = std::move(builder).build();
  return removed;
}

}  // namespace

Corpus filter_noninformative(const Corpus& corpus, const FilterPolicy& policy) {
  if (policy.empty()) {
    return corpus;
  }
  // Dropping assays shifts ubiquity shares, so iterate to a fixed point; this
  // makes the filter idempotent.
  Corpus current = corpus;
  for (;;) {
    Corpus next;
    const auto removed = filter_pass(current, policy, next);
    const bool changed = removed > 0 || next.size() != current.size();
    current = std::move(next);
    if (!changed) {
      return current;
    }
  }
}

// ---------------------------------------------------------------------------

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) {
    throw UsageError("corpus_stats: corpus is empty");
  }
  CorpusStats stats;
  stats.assay_count = corpus.size();
  const auto freq = corpus.vocabulary().frequencies();
  stats.vocabulary_size =
      static_cast<std::size_t>(std::count_if(freq.begin(), freq.end(), [](auto f) { return f > 0; }));
  stats.min_length = corpus[0].length();
  for (const auto& a : corpus.assays()) {
    const auto k = a.length();
    stats.min_length = std::min(stats.min_length, k);
    stats.max_length = std::max(stats.max_length, k);
    stats.total_annotations += k;
    ++stats.length_histogram[k];
  }
  stats.mean_length =
      static_cast<double>(stats.total_annotations) / static_cast<double>(stats.assay_count);
  return stats;
}

// ---------------------------------------------------------------------------

std::vector<FoldSplit> split_folds(const Corpus& corpus, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) {
    throw UsageError("split_folds: need at least 2 folds, got " + std::to_string(folds));
  }
  if (corpus.size() < folds) {
    throw UsageError("split_folds: " + std::to_string(corpus.size()) +
                     " assays cannot fill " + std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<FoldSplit> splits(folds);
  for (std::size_t i = 0; i < order.size(); ++i) {
    splits[i % folds].test_positions.push_back(order[i]);
  }
  for (auto& split : splits) {
    std::sort(split.test_positions.begin(), split.test_positions.end());
    std::vector<bool> in_test(corpus.size(), false);
    for (auto p : split.test_positions) {
      in_test[p] = true;
    }
    for (std::size_t p = 0; p < corpus.size(); ++p) {
      if (!in_test[p]) {
        split.train_positions.push_back(p);
      }
    }
  }
  return splits;
}

std::vector<FoldCorpora> materialize_folds(const Corpus& corpus,
                                           std::span<const FoldSplit> splits) {
  std::vector<FoldCorpora> out;
  out.reserve(splits.size());
  for (const auto& s : splits) {
    out.push_back({corpus.subset(s.train_positions), corpus.subset(s.test_positions)});
  }
  return out;
}

}  // namespace semantify
