#include "semantify/synthetic.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "semantify/error.hpp"
#include "semantify/random.hpp"

namespace semantify {
namespace {

constexpr std::array<std::string_view, 24> kPredicates = {
    "has assay format",        "assay measurement type",   "has detection method",
    "has assay method",        "has bioassay type",        "has target",
    "has organism",            "has participant",          "has assay control",
    "has assay kit",           "has signal direction",     "has readout content",
    "has endpoint",            "uses detection instrument", "has assay stage",
    "has perturbagen",         "has mode of action",       "has cell line",
    "has screening campaign",  "has assay footprint",      "has incubation time",
    "has temperature",         "has concentration unit",   "has result unit"};

constexpr std::array<std::string_view, 16> kSyllables = {
    "ka", "lo", "mi", "ren", "tas", "vo", "pel", "qui",
    "sar", "dun", "fe", "gor", "hi", "jun", "bex", "cyt"};

constexpr std::array<std::string_view, 20> kFiller = {
    "compound", "screen",     "inhibition", "activity", "sample",  "plate",  "well",
    "signal",   "response",   "measured",   "buffer",   "protocol", "incubated", "reagent",
    "dose",     "library",    "control",    "readout",  "cells",   "solution"};

// Distinct pronounceable word for every index.
std::string pseudo_word(std::size_t index) {
  std::string w;
  do {
    w += kSyllables[index % kSyllables.size()];
    index /= kSyllables.size();
  } while (index > 0);
  return w + "ine";
}

}  // namespace

Corpus make_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  if (spec.assays == 0 || spec.predicates == 0 || spec.objects_per_predicate == 0) {
    throw UsageError("synthetic corpus needs assays, predicates and objects");
  }
  if (spec.min_length == 0 || spec.min_length > spec.max_length) {
    throw UsageError("synthetic corpus needs 0 < min_length <= max_length");
  }
  if (spec.predicates > kPredicates.size()) {
    throw UsageError("synthetic corpus supports at most " + std::to_string(kPredicates.size()) +
                     " predicates");
  }
  const auto pool_size = spec.predicates * spec.objects_per_predicate;
  if (spec.max_length > pool_size) {
    throw UsageError("max_length exceeds the number of distinct statements");
  }

  std::vector<SemanticStatement> pool;
  std::vector<std::string> object_words;
  pool.reserve(pool_size);
  for (std::size_t p = 0; p < spec.predicates; ++p) {
    for (std::size_t o = 0; o < spec.objects_per_predicate; ++o) {
      const auto word = pseudo_word(pool.size() + 7);
      object_words.push_back(word);
      pool.push_back(make_statement(kPredicates[p], word + " format"));
    }
  }

  Rng rng(spec.seed);
  // Zipf-like popularity over a shuffled statement order.
  std::vector<std::size_t> order(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    order[i] = i;
  }
  rng.shuffle(order);
  std::vector<double> weight(pool_size);
  for (std::size_t r = 0; r < pool_size; ++r) {
    weight[order[r]] = 1.0 / std::pow(static_cast<double>(r + 1), 0.8);
  }

  CorpusBuilder builder;
  std::vector<SemanticStatement> gold;
  for (std::size_t a = 0; a < spec.assays; ++a) {
    const auto k = spec.min_length +
                   static_cast<std::size_t>(rng.uniform_index(spec.max_length - spec.min_length + 1));
    auto w = weight;
    gold.clear();
    std::vector<std::size_t> chosen;
    for (std::size_t n = 0; n < k; ++n) {
      double total = 0.0;
      for (double x : w) {
        total += x;
      }
      double target = rng.uniform_real() * total;
      std::size_t pick = pool_size - 1;
      for (std::size_t i = 0; i < pool_size; ++i) {
        if (w[i] <= 0.0) {
          continue;
        }
        if (target < w[i]) {
          pick = i;
          break;
        }
        target -= w[i];
      }
      while (w[pick] <= 0.0) {
        pick = (pick + pool_size - 1) % pool_size;
      }
      w[pick] = 0.0;
      chosen.push_back(pick);
      gold.push_back(pool[pick]);
    }

    std::string description = "Assay " + std::to_string(a + 1) + ".";
    for (std::size_t f = 0; f < spec.filler_words; ++f) {
      description += ' ';
      description += kFiller[rng.uniform_index(kFiller.size())];
      if (rng.uniform_real() < 0.12) {
        const auto c = chosen[rng.uniform_index(chosen.size())];
        if (rng.uniform_real() < spec.mention_rate) {
          description += ' ' + object_words[c];
        }
      }
      if (rng.uniform_real() < 0.03) {
        description += ' ' + object_words[rng.uniform_index(pool_size)];
      }
    }
    for (auto c : chosen) {
      if (rng.uniform_real() < spec.mention_rate) {
        description += " The " + object_words[c] + " setup was used.";
      }
    }
    builder.add({"SYN" + std::to_string(100000 + a), description}, gold);
  }
  return std::move(builder).build();
}

}  // namespace semantify
