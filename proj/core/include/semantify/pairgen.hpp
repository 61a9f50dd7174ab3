#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "semantify/corpus.hpp"

namespace semantify {

// One binary classification instance: does `statement` belong to the gold
// annotation of `assay_id`?
struct LabeledPair {
  std::string assay_id;
  StatementId statement{};
  bool label = false;

  bool operator==(const LabeledPair&) const = default;
};

enum class NegativeRefresh {
  once_per_run,  // one draw per training run
  per_epoch,     // trainers that iterate redraw every epoch
};

struct SamplingConfig {
  std::size_t false_per_assay = 170;
  std::uint64_t seed = 0;
  NegativeRefresh refresh = NegativeRefresh::once_per_run;
};

enum class StatementRendering {
  space,  // "predicate object"
  arrow,  // "predicate -> object"
};

std::string statement_text(const SemanticStatement& statement,
                           StatementRendering rendering = StatementRendering::space);

// One true pair per annotated statement, in corpus order.
std::vector<LabeledPair> positive_pairs(const Corpus& corpus);

// Per assay, min(false_per_assay, |S| - k) statements drawn uniformly without
// replacement from the vocabulary minus the assay's gold set. The draw for an
// assay depends only on (seed, assay id).
std::vector<LabeledPair> sample_negatives(const Corpus& corpus, const SamplingConfig& config);

// Negatives for one assay, as statement ids in draw order.
std::vector<StatementId> sample_negatives_for(const Corpus& corpus, std::size_t position,
                                              const SamplingConfig& config);

// Positives and negatives, shuffled by the config seed.
std::vector<LabeledPair> build_training_set(const Corpus& corpus, const SamplingConfig& config);

// Line-delimited {"assay_id", "statement_id", "label"} records.
void write_pairs_jsonl(std::ostream& out, const std::vector<LabeledPair>& pairs);
std::vector<LabeledPair> read_pairs_jsonl(std::istream& in);

// Line-delimited {"statement_id", "predicate", "object", "text", "frequency"}
// so exported pairs can be resolved to text offline.
void write_vocabulary_jsonl(std::ostream& out, const StatementVocabulary& vocabulary);

}  // namespace semantify
