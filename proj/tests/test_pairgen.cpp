#include <doctest.h>

#include <set>
#include <sstream>

#include "semantify/pairgen.hpp"
#include "semantify/synthetic.hpp"
#include "support/test_support.hpp"

using namespace semantify;
using semantify::testing::load_fixture;
using semantify::testing::random_corpus;

TEST_SUITE("pairgen") {

TEST_CASE("statement_text") {
  CHECK(statement_text(make_statement("has assay format", "biochemical format")) ==
        "has assay format biochemical format");
  CHECK(statement_text({"a", "b"}) == "a b");
  CHECK(statement_text({"a", "b"}, StatementRendering::arrow) == "a -> b");
}

TEST_CASE("rendered statement texts are distinct across a generated vocabulary") {
  SyntheticCorpusSpec spec;
  spec.assays = 300;
  const auto c = make_synthetic_corpus(spec);
  std::set<std::string> texts;
  for (const auto& s : c.vocabulary().statements()) {
    texts.insert(statement_text(s));
  }
  CHECK(texts.size() == c.vocabulary().size());
}

TEST_CASE("positive_pairs") {
  const auto c = load_fixture("fixture3.jsonl");
  const auto pairs = positive_pairs(c);
  CHECK(pairs.size() == 9);
  for (const auto& p : pairs) {
    CHECK(p.label);
    CHECK(c[*c.find(p.assay_id)].contains(p.statement));
  }
  const auto one = random_corpus(5, 1, 4, 1, 1);
  CHECK(positive_pairs(one).size() == 1);
}

TEST_CASE("sample_negatives clamps to the complement") {
  SUBCASE("assay annotated with the whole vocabulary") {
    CorpusBuilder b;
    const std::vector<SemanticStatement> all{{"p", "a"}, {"p", "b"}, {"p", "c"}};
    b.add({"X", "text"}, all);
    const auto c = std::move(b).build();
    CHECK(sample_negatives(c, {100, 1}).empty());
  }
  SUBCASE("five statements, k = 2, ten requested -> the 3-element complement") {
    const auto c = load_fixture("fixture3.jsonl");
    const auto negatives = sample_negatives_for(c, 0, {10, 3});
    REQUIRE(negatives.size() == 3);
    std::set<StatementId> complement;
    for (std::size_t i = 0; i < c.vocabulary().size(); ++i) {
      if (!c[0].contains(static_cast<StatementId>(i))) complement.insert(static_cast<StatementId>(i));
    }
    CHECK(std::set<StatementId>(negatives.begin(), negatives.end()) == complement);
  }
}

TEST_CASE("build_training_set") {
  SUBCASE("k = 3, false_per_assay = 7, |S| = 20") {
    CorpusBuilder b;
    std::vector<SemanticStatement> first, second;
    for (int i = 0; i < 3; ++i) first.push_back({"p", "g" + std::to_string(i)});
    for (int i = 0; i < 20; ++i) second.push_back({"p", i < 3 ? "g" + std::to_string(i) : "n" + std::to_string(i)});
    b.add({"K3", "t"}, first).add({"ALL", "t"}, second);
    const auto c = std::move(b).build();
    REQUIRE(c.vocabulary().size() == 20);
    const auto set = build_training_set(c, {7, 11});
    std::size_t n = 0, t = 0;
    for (const auto& p : set) {
      if (p.assay_id == "K3") {
        ++n;
        t += p.label ? 1 : 0;
      }
    }
    CHECK(n == 10);
    CHECK(t == 3);
  }
  SUBCASE("false_per_assay = 0 yields positives only") {
    const auto c = load_fixture("fixture3.jsonl");
    const auto set = build_training_set(c, {0, 1});
    CHECK(set.size() == 9);
    CHECK(std::all_of(set.begin(), set.end(), [](const auto& p) { return p.label; }));
  }
  SUBCASE("same seed gives a byte-identical sequence") {
    const auto c = random_corpus(8, 20, 40, 2, 8);
    std::ostringstream a, b;
    write_pairs_jsonl(a, build_training_set(c, {10, 99}));
    write_pairs_jsonl(b, build_training_set(c, {10, 99}));
    CHECK(a.str() == b.str());
    std::ostringstream other;
    write_pairs_jsonl(other, build_training_set(c, {10, 100}));
    CHECK(other.str() != a.str());
  }
}

TEST_CASE("true and false pairs never overlap and pairs are unique") {
  for (std::uint32_t seed = 1; seed <= 25; ++seed) {
    const auto c = random_corpus(seed, 8, 15, 1, 12);
    const auto set = build_training_set(c, {seed % 9, seed});
    std::set<std::pair<std::string, StatementId>> seen;
    for (const auto& p : set) {
      CHECK(seen.insert({p.assay_id, p.statement}).second);
      const auto gold = semantify::testing::gold_contents(c, *c.find(p.assay_id));
      CHECK(p.label == (gold.count(c.statement(p.statement)) > 0));
    }
  }
}

TEST_CASE("negative sampling is uniform over the complement") {
  // |S| = 10, k = 2, F = 3: each complement statement is drawn with probability 3/8.
  CorpusBuilder b;
  std::vector<SemanticStatement> all;
  for (int i = 0; i < 10; ++i) all.push_back({"p", "s" + std::to_string(i)});
  b.add({"U", "t"}, std::vector<SemanticStatement>(all.begin(), all.begin() + 2));
  b.add({"V", "t"}, all);
  const auto c = std::move(b).build();
  constexpr int kRuns = 4000;
  std::map<StatementId, int> hits;
  for (int s = 0; s < kRuns; ++s) {
    for (auto id : sample_negatives_for(c, 0, {3, static_cast<std::uint64_t>(s)})) ++hits[id];
  }
  CHECK(hits.size() == 8);
  for (const auto& [id, n] : hits) {
    CHECK(static_cast<double>(n) / kRuns == doctest::Approx(3.0 / 8.0).epsilon(0.08));
  }
}

TEST_CASE("pair export round-trips") {
  const auto c = load_fixture("fixture3.jsonl");
  const auto pairs = build_training_set(c, {2, 5});
  std::stringstream buf;
  write_pairs_jsonl(buf, pairs);
  CHECK(read_pairs_jsonl(buf) == pairs);
  std::ostringstream vocab;
  write_vocabulary_jsonl(vocab, c.vocabulary());
  CHECK(vocab.str().find("\"text\":\"has assay format biochemical format\"") != std::string::npos);
}

}  // TEST_SUITE
