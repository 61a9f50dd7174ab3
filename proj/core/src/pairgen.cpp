#include "semantify/pairgen.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "semantify/error.hpp"
#include "semantify/random.hpp"

namespace semantify {

std::string statement_text(const SemanticStatement& statement, StatementRendering rendering) {
  const char* sep = rendering == StatementRendering::arrow ? " -> " : " ";
  return statement.predicate + sep + statement.object;
}

std::vector<LabeledPair> positive_pairs(const Corpus& corpus) {
  std::vector<LabeledPair> pairs;
  for (const auto& a : corpus.assays()) {
    for (auto id : a.statements) {
      pairs.push_back({a.assay.id, id, true});
    }
  }
  return pairs;
}

std::vector<StatementId> sample_negatives_for(const Corpus& corpus, std::size_t position,
                                              const SamplingConfig& config) {
  const auto& assay = corpus[position];
  const auto vocab_size = corpus.vocabulary().size();
  std::vector<bool> gold(vocab_size, false);
  for (auto id : assay.statements) {
    gold[to_index(id)] = true;
  }
  std::vector<StatementId> complement;
  complement.reserve(vocab_size - assay.length());
  for (std::size_t i = 0; i < vocab_size; ++i) {
    if (!gold[i]) {
      complement.push_back(static_cast<StatementId>(i));
    }
  }

  Rng rng(derive_seed(config.seed, "negatives:" + assay.assay.id));
  const auto picks = rng.sample_without_replacement(complement.size(), config.false_per_assay);
  std::vector<StatementId> out;
  out.reserve(picks.size());
  for (auto p : picks) {
    out.push_back(complement[p]);
  }
  return out;
}

std::vector<LabeledPair> sample_negatives(const Corpus& corpus, const SamplingConfig& config) {
  std::vector<LabeledPair> pairs;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (auto id : sample_negatives_for(corpus, i, config)) {
      pairs.push_back({corpus[i].assay.id, id, false});
    }
  }
  return pairs;
}

std::vector<LabeledPair> build_training_set(const Corpus& corpus, const SamplingConfig& config) {
  auto pairs = positive_pairs(corpus);
  auto negatives = sample_negatives(corpus, config);
  pairs.insert(pairs.end(), std::make_move_iterator(negatives.begin()),
               std::make_move_iterator(negatives.end()));
  Rng rng(derive_seed(config.seed, "training-shuffle"));
  rng.shuffle(pairs);
  return pairs;
}

void write_pairs_jsonl(std::ostream& out, const std::vector<LabeledPair>& pairs) {
  for (const auto& p : pairs) {
    const nlohmann::json record = {
        {"assay_id", p.assay_id}, {"statement_id", to_index(p.statement)}, {"label", p.label}};
    out << record.dump() << '\n';
  }
}

std::vector<LabeledPair> read_pairs_jsonl(std::istream& in) {
  std::vector<LabeledPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    try {
      const auto record = nlohmann::json::parse(line);
      pairs.push_back({record.at("assay_id").get<std::string>(),
                       static_cast<StatementId>(record.at("statement_id").get<std::uint32_t>()),
                       record.at("label").get<bool>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed pair record: ") + e.what(),
                       "pairs:" + std::to_string(line_no));
    }
  }
  return pairs;
}

void write_vocabulary_jsonl(std::ostream& out, const StatementVocabulary& vocabulary) {
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    const auto id = static_cast<StatementId>(i);
    const auto& s = vocabulary.at(id);
    const nlohmann::json record = {{"statement_id", i},
                                   {"predicate", s.predicate},
                                   {"object", s.object},
                                   {"text", statement_text(s)},
                                   {"frequency", vocabulary.frequency(id)}};
    out << record.dump() << '\n';
  }
}

}  // namespace semantify
