#include <doctest.h>

#include <set>
#include <sstream>

#include "semantify/error.hpp"
#include "semantify/scoring.hpp"
#include "semantify/synthetic.hpp"
#include "support/test_support.hpp"

using namespace semantify;
using semantify::testing::load_fixture;
using semantify::testing::random_corpus;
using semantify::testing::TableScorer;

namespace {

FrequencyModel trained_frequency(const Corpus& c, const std::vector<LabeledPair>& pairs = {}) {
  FrequencyModel m;
  m.train({c, pairs, {}});
  return m;
}

std::vector<SemanticStatement> vocab_of(const Corpus& c) {
  const auto s = c.vocabulary().statements();
  return {s.begin(), s.end()};
}

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("frequency model scores freq / max_freq") {
  const auto c = load_fixture("fixture3.jsonl");
  const auto m = trained_frequency(c);
  const Bioassay any{"any", "whatever"};
  CHECK(m.score(any, make_statement("has assay format", "biochemical format")).value == 1.0);
  CHECK(m.score(any, make_statement("has organism", "homo sapiens")).value ==
        doctest::Approx(1.0 / 3.0));
  const auto unknown = m.score(any, make_statement("has organism", "mus musculus"));
  CHECK(unknown.value == 0.0);
  CHECK(unknown.unknown_statement);
  CHECK(m.max_frequency() == 3);
}

TEST_CASE("single-assay corpus: every annotated statement scores 1") {
  const auto c = random_corpus(2, 1, 6, 4, 4);
  const auto m = trained_frequency(c);
  for (auto id : c[0].statements) {
    CHECK(m.score(c[0].assay, c.statement(id)).value == 1.0);
  }
}

TEST_CASE("untrained scorers refuse to score") {
  FrequencyModel f;
  LexicalModel l;
  const SemanticStatement s{"p", "o"};
  CHECK_THROWS_AS(f.score({"a", "b"}, s), UsageError);
  CHECK_THROWS_AS(l.score({"a", "b"}, s), UsageError);
  CHECK_THROWS_AS(trained_frequency(Corpus{}), UsageError);
}

TEST_CASE("predict thresholds with ties included") {
  TableScorer t;
  const SemanticStatement a{"p", "A"}, b{"p", "B"};
  t.set("x", a, 0.9);
  t.set("x", b, 0.4);
  t.mark_trained();
  const std::vector<SemanticStatement> cands{a, b};
  CHECK(predict(t, {"x", "d"}, cands, 0.5) == std::vector<SemanticStatement>{a});
  CHECK(predict(t, {"x", "d"}, cands, 0.0) == cands);
  CHECK(predict(t, {"x", "d"}, cands, 0.4) == cands);
  CHECK_THROWS_AS(predict(t, {"x", "d"}, cands, 1.5), UsageError);
}

TEST_CASE("frequency model with fitted K predicts exactly the K most frequent statements") {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    const auto c = random_corpus(seed, 12, 20, 2, 9);
    const auto pairs = build_training_set(c, {6, seed});
    const auto m = trained_frequency(c, pairs);

    // Brute-force rank: recount, sort by (frequency desc, text asc).
    std::map<SemanticStatement, std::size_t> freq;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (const auto& s : semantify::testing::gold_contents(c, i)) ++freq[s];
    std::vector<std::pair<std::size_t, SemanticStatement>> order;
    for (const auto& [s, f] : freq) order.emplace_back(f, s);
    std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return semantify::testing::joined(x.second) < semantify::testing::joined(y.second);
    });
    std::set<SemanticStatement> top;
    for (std::size_t i = 0; i < m.decision_rank(); ++i) top.insert(order[i].second);

    const auto predicted = predict(m, c[0].assay, vocab_of(c), m.default_threshold());
    CHECK(std::set<SemanticStatement>(predicted.begin(), predicted.end()) == top);
  }
}

TEST_CASE("frequency model matches the brute-force baseline exactly") {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    const auto c = random_corpus(seed, 15, 25, 1, 10);
    const auto pairs = build_training_set(c, {5, seed});
    const auto m = trained_frequency(c, pairs);
    const auto oracle = semantify::testing::brute_frequency(c, pairs);
    for (const auto& s : c.vocabulary().statements()) {
      CHECK(m.score(c[0].assay, s).value == oracle.score(s));
    }
    CHECK(m.default_threshold() ==
          static_cast<double>(oracle.cutoff_level) / static_cast<double>(oracle.max_freq));
  }
}

TEST_CASE("fallback decision rank is the rounded mean annotation length") {
  const auto c = load_fixture("fixture3.jsonl");  // mean length 3
  const auto m = trained_frequency(c);
  // Ranking 3,2,2,1,1: rank 3 ties with rank 2, so the tie group ends at 3.
  CHECK(m.decision_rank() == 3);
  CHECK(m.default_threshold() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("rank_statements") {
  SUBCASE("ties break on ascending statement text") {
    TableScorer t;
    const SemanticStatement a{"a", "x"}, b{"b", "x"};
    t.set("q", a, 0.9);
    t.set("q", b, 0.9);
    t.mark_trained();
    const std::vector<SemanticStatement> cands{b, a};
    const auto r = rank_statements(t, {"q", "d"}, cands);
    REQUIRE(r.size() == 2);
    CHECK(r[0].statement == a);
    CHECK(r[1].statement == b);
  }
  SUBCASE("frequency ranking follows descending training frequency") {
    const auto c = load_fixture("fixture3.jsonl");
    const auto m = trained_frequency(c);
    const auto r = rank_statements(m, c[0].assay, vocab_of(c));
    for (std::size_t i = 1; i < r.size(); ++i) {
      CHECK(m.frequency(r[i - 1].statement) >= m.frequency(r[i].statement));
    }
    CHECK(r.front().statement == make_statement("has assay format", "biochemical format"));
  }
  SUBCASE("empty candidates") {
    const auto m = trained_frequency(load_fixture("fixture3.jsonl"));
    CHECK(rank_statements(m, {"x", "y"}, {}).empty());
  }
}

TEST_CASE("ranking properties over random scorers") {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    const auto c = random_corpus(seed, 4, 15, 2, 6);
    const auto t = semantify::testing::random_table_scorer(c, seed);
    const auto cands = vocab_of(c);
    const auto r = rank_statements(t, c[0].assay, cands);
    // Permutation of the candidates.
    std::multiset<SemanticStatement> in(cands.begin(), cands.end()), out;
    for (const auto& x : r) out.insert(x.statement);
    CHECK(in == out);
    for (std::size_t i = 1; i < r.size(); ++i) {
      CHECK_FALSE(ranks_before(r[i].statement, r[i].score, r[i - 1].statement, r[i - 1].score));
    }
    // Input order does not matter.
    auto reversed = cands;
    std::reverse(reversed.begin(), reversed.end());
    const auto r2 = rank_statements(t, c[0].assay, reversed);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i].statement == r2[i].statement);
    // Monotone thresholds.
    for (double t1 : {0.0, 0.25, 0.5}) {
      const auto lo = predict(t, c[0].assay, cands, t1);
      const auto hi = predict(t, c[0].assay, cands, t1 + 0.25);
      const std::set<SemanticStatement> los(lo.begin(), lo.end());
      for (const auto& s : hi) CHECK(los.count(s) == 1);
    }
  }
}

TEST_CASE("frequency ranking is identical for different assays") {
  const auto c = random_corpus(4, 10, 20, 2, 8);
  const auto m = trained_frequency(c);
  const auto r1 = rank_statements(m, c[0].assay, vocab_of(c));
  const auto r2 = rank_statements(m, c[5].assay, vocab_of(c));
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].statement == r2[i].statement);
}

TEST_CASE("lexical model") {
  SyntheticCorpusSpec spec;
  spec.assays = 60;
  const auto c = make_synthetic_corpus(spec);
  const auto pairs = build_training_set(c, {30, 5});
  LexicalModel m({6, 0.05, 1e-4, 9});
  m.train({c, pairs, {30, 5}});

  SUBCASE("zero token overlap scores at most 0.5") {
    const Bioassay unrelated{"new", "zzz qqq"};
    for (const auto& s : c.vocabulary().statements()) {
      CHECK(m.score(unrelated, s).value <= 0.5);
    }
  }
  SUBCASE("scores lie in [0, 1] and batch equals single") {
    const auto cands = vocab_of(c);
    const auto batch = m.score_batch(c[1].assay, cands);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      CHECK(batch[i].value >= 0.0);
      CHECK(batch[i].value <= 1.0);
      CHECK(batch[i].value == m.score(c[1].assay, cands[i]).value);
    }
  }
  SUBCASE("overlap raises the score") {
    CHECK(m.weights()[1] + m.weights()[2] > 0.0);
  }
  SUBCASE("reproducible given seed and hyperparameters") {
    LexicalModel again({6, 0.05, 1e-4, 9});
    again.train({c, pairs, {30, 5}});
    CHECK(again.weights() == m.weights());
  }
  SUBCASE("per-epoch negative refresh trains deterministically") {
    SamplingConfig cfg{30, 5, NegativeRefresh::per_epoch};
    LexicalModel a({3, 0.05, 1e-4, 1}), b({3, 0.05, 1e-4, 1});
    a.train({c, {}, cfg});
    b.train({c, {}, cfg});
    CHECK(a.weights() == b.weights());
  }
  SUBCASE("unknown statements score 0 with a flag") {
    const auto s = m.score(c[0].assay, {"never", "seen"});
    CHECK(s.value == 0.0);
    CHECK(s.unknown_statement);
  }
  SUBCASE("pairs outside the training corpus are rejected") {
    std::vector<LabeledPair> bad{{"elsewhere", StatementId{0}, true}};
    LexicalModel l;
    CHECK_THROWS_AS(l.train({c, bad, {}}), ValidationError);
  }
}

TEST_CASE("model files round-trip and reject unknown versions") {
  const auto c = load_fixture("fixture3.jsonl");
  const auto pairs = build_training_set(c, {2, 3});

  FrequencyModel f;
  f.train({c, pairs, {}});
  LexicalModel l({4, 0.1, 0.0, 2});
  l.train({c, pairs, {}});

  for (const Scorer* model : std::initializer_list<const Scorer*>{&f, &l}) {
    std::stringstream buf;
    model->save(buf);
    const auto text = buf.str();
    const auto loaded = load_model(buf);
    CHECK(loaded->kind() == model->kind());
    CHECK(loaded->training_assays() == model->training_assays());
    CHECK(loaded->default_threshold() == model->default_threshold());
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (const auto& s : c.vocabulary().statements()) {
        CHECK(loaded->score(c[i].assay, s).value == model->score(c[i].assay, s).value);
      }
    }
    std::stringstream again;
    loaded->save(again);
    CHECK(again.str() == text);

    auto bumped = text;
    bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 99");
    std::istringstream in(bumped);
    CHECK_THROWS_AS(load_model(in), ParseError);
  }
  std::istringstream junk("{\"format\": \"other\"}");
  CHECK_THROWS_AS(load_model(junk), ParseError);
  std::istringstream kind(R"({"format":"semantify-model","version":1,"kind":"magic","training_assays":[]})");
  CHECK_THROWS_AS(load_model(kind), ParseError);
}

}  // TEST_SUITE
