#include <algorithm>
#include <cmath>

#include "semantify/error.hpp"
#include "semantify/scoring.hpp"

namespace semantify {

void FrequencyModel::index_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    const double sa = static_cast<double>(a.frequency);
    const double sb = static_cast<double>(b.frequency);
    return ranks_before(a.statement, sa, b.statement, sb);
  });
  frequency_.clear();
  max_frequency_ = 0;
  for (const auto& e : entries) {
    frequency_.emplace(e.statement, e.frequency);
    max_frequency_ = std::max(max_frequency_, e.frequency);
  }
  ranking_ = std::move(entries);
}

void FrequencyModel::set_decision_rank(std::size_t k) {
  if (ranking_.empty() || max_frequency_ == 0) {
    throw UsageError("frequency model has no statements with non-zero frequency");
  }
  const auto positive = static_cast<std::size_t>(
      std::count_if(ranking_.begin(), ranking_.end(), [](const Entry& e) { return e.frequency > 0; }));
  k = std::clamp<std::size_t>(k, 1, positive);
  cutoff_ = static_cast<double>(ranking_[k - 1].frequency) / static_cast<double>(max_frequency_);
  // Statements tied with the K-th score are classified alike, so K is reported
  // as the full extent of the tie group.
  while (k < ranking_.size() && ranking_[k].frequency == ranking_[k - 1].frequency) {
    ++k;
  }
  decision_rank_ = k;
}

void FrequencyModel::train(const TrainingData& data) {
  const auto& corpus = data.corpus;
  if (corpus.empty()) {
    throw UsageError("cannot train a frequency model on an empty corpus");
  }
  const auto& vocab = corpus.vocabulary();
  std::vector<Entry> entries;
  entries.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto id = static_cast<StatementId>(i);
    entries.push_back({vocab.at(id), vocab.frequency(id)});
  }
  index_entries(std::move(entries));
  record_training_assays(corpus);
  trained_ = true;

  if (data.pairs.empty()) {
    const auto stats = corpus_stats(corpus);
    set_decision_rank(static_cast<std::size_t>(std::lround(stats.mean_length)));
    return;
  }

  // Sweep cutoffs over the distinct frequency levels, highest first, keeping
  // the level with the best pair F1 (earliest on ties).
  std::vector<std::pair<std::size_t, bool>> by_freq;
  by_freq.reserve(data.pairs.size());
  std::size_t positives = 0;
  for (const auto& p : data.pairs) {
    by_freq.emplace_back(vocab.frequency(p.statement), p.label);
    positives += p.label ? 1 : 0;
  }
  std::sort(by_freq.begin(), by_freq.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  std::size_t tp = 0;
  std::size_t fp = 0;
  double best_f1 = -1.0;
  std::size_t best_level = max_frequency_;
  std::size_t i = 0;
  while (i < by_freq.size() && by_freq[i].first > 0) {
    const auto level = by_freq[i].first;
    while (i < by_freq.size() && by_freq[i].first == level) {
      (by_freq[i].second ? tp : fp) += 1;
      ++i;
    }
    const double f1 = positives == 0 ? 0.0 : 2.0 * static_cast<double>(tp) /
                                                 static_cast<double>(tp + fp + positives);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_level = level;
    }
  }
  const auto k = static_cast<std::size_t>(std::count_if(
      ranking_.begin(), ranking_.end(), [&](const Entry& e) { return e.frequency >= best_level; }));
  set_decision_rank(k);
}

Score FrequencyModel::score(const Bioassay&, const SemanticStatement& statement) const {
  require_trained();
  const auto it = frequency_.find(statement);
  if (it == frequency_.end()) {
    return {0.0, true};
  }
  return {static_cast<double>(it->second) / static_cast<double>(max_frequency_), false};
}

std::size_t FrequencyModel::frequency(const SemanticStatement& statement) const {
  const auto it = frequency_.find(statement);
  return it == frequency_.end() ? 0 : it->second;
}

FrequencyModel FrequencyModel::from_entries(std::vector<Entry> entries, std::size_t decision_rank,
                                            std::vector<std::string> training_assays) {
  FrequencyModel m;
  m.index_entries(std::move(entries));
  m.set_decision_rank(decision_rank);
  m.set_training_assays(std::move(training_assays));
  m.trained_ = true;
  return m;
}

}  // namespace semantify
