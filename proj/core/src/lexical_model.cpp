#include <algorithm>
#include <cmath>
#include <numeric>

#include "semantify/error.hpp"
#include "semantify/random.hpp"
#include "semantify/scoring.hpp"
#include "semantify/text.hpp"

namespace semantify {
namespace {

std::vector<std::string> token_set(std::string_view s) {
  auto tokens = text::tokenize(s);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t shared_count(std::span<const std::string> a, std::span<const std::string> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

LexicalModel::Weights LexicalModel::features(std::span<const std::string> assay_tokens_sorted,
                                             std::span<const std::string> statement_tokens_sorted,
                                             double prior) {
  const auto shared = shared_count(assay_tokens_sorted, statement_tokens_sorted);
  const double ratio = statement_tokens_sorted.empty()
                           ? 0.0
                           : static_cast<double>(shared) /
                                 static_cast<double>(statement_tokens_sorted.size());
  return {1.0, std::log1p(static_cast<double>(shared)), ratio, prior - 1.0};
}

void LexicalModel::index_statements(std::vector<KnownStatement> known) {
  statements_.clear();
  for (auto& k : known) {
    statements_[k.statement] = {token_set(statement_text(k.statement)), k.prior};
  }
}

double LexicalModel::probability(std::span<const std::string> assay_tokens,
                                 const StatementInfo& info) const {
  const auto x = features(assay_tokens, info.tokens, info.prior);
  return sigmoid(std::inner_product(x.begin(), x.end(), weights_.begin(), 0.0));
}

void LexicalModel::train(const TrainingData& data) {
  const auto& corpus = data.corpus;
  if (corpus.empty()) {
    throw UsageError("cannot train a lexical model on an empty corpus");
  }
  if (data.pairs.empty() && data.sampling.refresh == NegativeRefresh::once_per_run) {
    throw UsageError("cannot train a lexical model without training pairs");
  }
  const auto& vocab = corpus.vocabulary();
  const auto freqs = vocab.frequencies();
  const double max_freq = static_cast<double>(*std::max_element(freqs.begin(), freqs.end()));
  std::vector<KnownStatement> known;
  known.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    known.push_back({vocab.statements()[i], static_cast<double>(freqs[i]) / max_freq});
  }
  index_statements(known);

  std::vector<std::vector<std::string>> assay_tokens;
  assay_tokens.reserve(corpus.size());
  for (const auto& a : corpus.assays()) {
    assay_tokens.push_back(token_set(a.assay.description));
  }
  std::vector<const StatementInfo*> info_by_id;
  info_by_id.reserve(vocab.size());
  for (const auto& s : vocab.statements()) {
    info_by_id.push_back(&statements_.at(s));
  }

  struct Example {
    Weights x;
    double y;
  };
  auto featurize = [&](std::span<const LabeledPair> pairs) {
    std::vector<Example> examples;
    examples.reserve(pairs.size());
    for (const auto& p : pairs) {
      const auto pos = corpus.find(p.assay_id);
      if (!pos) {
        throw ValidationError("training pair references assay " + p.assay_id +
                              " outside the training corpus");
      }
      const auto& info = *info_by_id.at(to_index(p.statement));
      examples.push_back({features(assay_tokens[*pos], info.tokens, info.prior),
                          p.label ? 1.0 : 0.0});
    }
    return examples;
  };

  const bool per_epoch = data.sampling.refresh == NegativeRefresh::per_epoch;
  std::vector<Example> examples;
  if (!per_epoch) {
    examples = featurize(data.pairs);
  }
  weights_ = {};
  for (std::size_t epoch = 0; epoch < hyperparams_.epochs; ++epoch) {
    const auto tag = "epoch:" + std::to_string(epoch);
    if (per_epoch) {
      SamplingConfig cfg = data.sampling;
      cfg.seed = derive_seed(data.sampling.seed, tag);
      examples = featurize(build_training_set(corpus, cfg));
    }
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(hyperparams_.seed, tag));
    rng.shuffle(order);
    for (auto i : order) {
      const auto& ex = examples[i];
      const double p =
          sigmoid(std::inner_product(ex.x.begin(), ex.x.end(), weights_.begin(), 0.0));
      const double g = p - ex.y;
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const double reg = f == 0 ? 0.0 : hyperparams_.l2 * weights_[f];
        weights_[f] -= hyperparams_.learning_rate * (g * ex.x[f] + reg);
      }
      // Keep zero-overlap logits non-positive: bias <= 0, prior weight >= 0.
      weights_[0] = std::min(weights_[0], 0.0);
      weights_[3] = std::max(weights_[3], 0.0);
    }
  }
  record_training_assays(corpus);
  trained_ = true;
}

Score LexicalModel::score(const Bioassay& assay, const SemanticStatement& statement) const {
  return score_batch(assay, std::span<const SemanticStatement>(&statement, 1)).front();
}

std::vector<Score> LexicalModel::score_batch(const Bioassay& assay,
                                             std::span<const SemanticStatement> statements) const {
  require_trained();
  const auto tokens = token_set(assay.description);
  std::vector<Score> out;
  out.reserve(statements.size());
  for (const auto& s : statements) {
    const auto it = statements_.find(s);
    if (it == statements_.end()) {
      out.push_back({0.0, true});
    } else {
      out.push_back({probability(tokens, it->second), false});
    }
  }
  return out;
}

std::vector<LexicalModel::KnownStatement> LexicalModel::known_statements() const {
  std::vector<KnownStatement> out;
  out.reserve(statements_.size());
  for (const auto& [s, info] : statements_) {
    out.push_back({s, info.prior});
  }
  return out;
}

LexicalModel LexicalModel::from_state(LexicalHyperparams hyperparams, Weights weights,
                                      std::vector<KnownStatement> known,
                                      std::vector<std::string> training_assays) {
  LexicalModel m(hyperparams);
  m.weights_ = weights;
  m.index_statements(std::move(known));
  m.set_training_assays(std::move(training_assays));
  m.trained_ = true;
  return m;
}

}  // namespace semantify
