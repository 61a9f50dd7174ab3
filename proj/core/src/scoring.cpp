#include "semantify/scoring.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "semantify/error.hpp"

namespace semantify {

std::vector<Score> Scorer::score_batch(const Bioassay& assay,
                                       std::span<const SemanticStatement> statements) const {
  std::vector<Score> out;
  out.reserve(statements.size());
  for (const auto& s : statements) {
    out.push_back(score(assay, s));
  }
  return out;
}

void Scorer::save(std::ostream&) const {
  throw UsageError("scorer \"" + kind() + "\" cannot be saved");
}

void Scorer::record_training_assays(const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& a : corpus.assays()) {
    ids.push_back(a.assay.id);
  }
  set_training_assays(std::move(ids));
}

void Scorer::set_training_assays(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  training_assays_ = std::move(ids);
}

void Scorer::require_trained() const {
  if (!trained()) {
    throw UsageError("scorer \"" + kind() + "\" used before training");
  }
}

// ---------------------------------------------------------------------------

namespace {

struct RankKey {
  double score;
  std::string text;
  const SemanticStatement* statement;
};

bool key_before(const RankKey& a, const RankKey& b) {
  if (a.score != b.score) {
    return a.score > b.score;
  }
  if (a.text != b.text) {
    return a.text < b.text;
  }
  return *a.statement < *b.statement;
}

std::vector<std::size_t> ranked_order(std::span<const SemanticStatement> candidates,
                                      std::span<const Score> scores) {
  std::vector<RankKey> keys;
  keys.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    keys.push_back({scores[i].value, statement_text(candidates[i]), &candidates[i]});
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return key_before(keys[a], keys[b]); });
  return order;
}

}  // namespace

bool ranks_before(const SemanticStatement& a, double score_a, const SemanticStatement& b,
                  double score_b) {
  return key_before({score_a, statement_text(a), &a}, {score_b, statement_text(b), &b});
}

std::vector<SemanticStatement> predict(const Scorer& model, const Bioassay& assay,
                                       std::span<const SemanticStatement> candidates,
                                       double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw UsageError("threshold must lie in [0, 1]");
  }
  const auto scores = model.score_batch(assay, candidates);
  std::vector<SemanticStatement> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (scores[i].value >= threshold) {
      out.push_back(candidates[i]);
    }
  }
  return out;
}

std::vector<RankedStatement> rank_statements(const Scorer& model, const Bioassay& assay,
                                             std::span<const SemanticStatement> candidates) {
  if (candidates.empty()) {
    return {};
  }
  const auto scores = model.score_batch(assay, candidates);
  std::vector<RankedStatement> out;
  out.reserve(candidates.size());
  for (auto i : ranked_order(candidates, scores)) {
    out.push_back({candidates[i], scores[i].value});
  }
  return out;
}

std::vector<RankedId> rank_ids(const Scorer& model, const Bioassay& assay,
                               const StatementVocabulary& vocabulary,
                               std::span<const StatementId> candidates) {
  if (candidates.empty()) {
    return {};
  }
  std::vector<SemanticStatement> statements;
  statements.reserve(candidates.size());
  for (auto id : candidates) {
    statements.push_back(vocabulary.at(id));
  }
  const auto scores = model.score_batch(assay, statements);
  std::vector<RankedId> out;
  out.reserve(candidates.size());
  for (auto i : ranked_order(statements, scores)) {
    out.push_back({candidates[i], scores[i].value});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Scorer> load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open model file " + path.string());
  }
  return load_model(in);
}

void save_model_file(const Scorer& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write model file " + path.string());
  }
  model.save(out);
  if (!out) {
    throw IoError("failed writing model file " + path.string());
  }
}

}  // namespace semantify
