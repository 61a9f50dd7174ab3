#pragma once

#include <cstddef>
#include <cstdint>

#include "semantify/corpus.hpp"

namespace semantify {

// Generator for corpora shaped like annotated assay collections: a pool of
// predicates with several object values each, Zipf-like statement popularity,
// and descriptions that mention some of the gold objects among filler text.
struct SyntheticCorpusSpec {
  std::size_t assays = 100;
  std::size_t predicates = 24;
  std::size_t objects_per_predicate = 12;
  std::size_t min_length = 5;
  std::size_t max_length = 30;
  // Probability that a gold statement's object words appear in the description.
  double mention_rate = 0.6;
  std::size_t filler_words = 40;
  std::uint64_t seed = 1;
};

Corpus make_synthetic_corpus(const SyntheticCorpusSpec& spec);

}  // namespace semantify
