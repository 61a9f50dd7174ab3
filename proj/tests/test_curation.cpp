#include <doctest.h>

#include <thread>

#include "semantify/curation.hpp"
#include "semantify/error.hpp"
#include "support/test_support.hpp"

using namespace semantify;
namespace st = semantify::testing;

namespace {

// Drives a session the way an operator following the suggestions would:
// approve gold, reject the rest, until every gold statement is approved.
std::vector<Mark> follow_suggestions(CurationStore& store, const Corpus& c, std::size_t i,
                                     const std::string& session) {
  std::vector<Mark> marks;
  std::size_t remaining = c[i].length();
  auto s = store.next(c[i].assay.id, session);
  while (remaining > 0 && s) {
    const bool gold = c[i].contains(s->id);
    marks.push_back(gold ? Mark::hit : Mark::miss);
    remaining -= gold ? 1 : 0;
    s = store.decide(c[i].assay.id, session, s->id, gold ? Decision::approve : Decision::reject);
  }
  return marks;
}

}  // namespace

TEST_SUITE("curation") {

TEST_CASE("suggestions replay the hit-and-miss trace") {
  for (std::uint32_t seed = 1; seed <= 10; ++seed) {
    const auto c = st::random_corpus(seed, 5, 16, 1, 6);
    const auto t = st::random_table_scorer(c, seed + 3);
    CurationStore store(c, t);
    const auto traces = hit_and_miss_all(t, c, false);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(follow_suggestions(store, c, i, "s") == traces[i].marks);
      // Approved statements are exactly the gold annotation, as curated triples.
      const auto curated = store.triples(c[i].assay.id, "s");
      const auto gold = st::gold_contents(c, i);
      REQUIRE(curated.size() == gold.size());
      for (const auto& tr : curated.triples()) {
        CHECK(gold.count({tr.predicate, tr.object}) == 1);
        CHECK(tr.provenance == Provenance::curated);
      }
    }
  }
}

TEST_CASE("sessions are independent and decisions are logged") {
  const auto c = st::load_fixture("fixture3.jsonl");
  FrequencyModel m;
  m.train({c, {}, {}});
  CurationStore store(c, m);

  const auto first = store.next("A1", "alice");
  REQUIRE(first);
  CHECK(first->statement == make_statement("has assay format", "biochemical format"));
  const auto second = store.decide("A1", "alice", first->id, Decision::approve);
  REQUIRE(second);
  CHECK(second->id != first->id);
  CHECK(store.next("A1", "bob")->id == first->id);

  CHECK_THROWS_AS(store.decide("A1", "alice", first->id, Decision::reject),
                  CurationStore::Conflict);
  CHECK_THROWS_AS(store.next("nope", "alice"), CurationStore::NotFound);
  CHECK_THROWS_AS(store.decide("A1", "alice", static_cast<StatementId>(999), Decision::approve),
                  CurationStore::NotFound);
  CHECK_THROWS_AS(store.next("A1", ""), UsageError);

  const auto log = store.log("A1", "alice");
  REQUIRE(log.size() == 1);
  CHECK(log[0].decision == Decision::approve);
  const auto p = store.progress("A1", "alice");
  CHECK(p.decisions == 1);
  CHECK(p.approvals == 1);
  CHECK(p.remaining == c.vocabulary().size() - 1);

  // Deciding everything exhausts the suggestions.
  auto s = store.next("A2", "carol");
  while (s) s = store.decide("A2", "carol", s->id, Decision::reject);
  CHECK_FALSE(store.next("A2", "carol"));
  CHECK(store.triples("A2", "carol").empty());
}

TEST_CASE("assay listing and titles") {
  const auto c = st::load_fixture("fixture3.jsonl");
  FrequencyModel m;
  m.train({c, {}, {}});
  CurationStore store(c, m);
  const auto list = store.assays();
  REQUIRE(list.size() == 3);
  CHECK(list[0].id == "A1");
  CHECK(CurationStore::title_for({"x", "First sentence. Second one."}) == "First sentence.");
  const auto long_title = CurationStore::title_for({"x", std::string(200, 'a')});
  CHECK(long_title.size() == 80);
  CHECK(long_title.substr(77) == "...");
}

TEST_CASE("concurrent sessions") {
  const auto c = st::random_corpus(21, 4, 30, 2, 8);
  const auto t = st::random_table_scorer(c, 5);
  CurationStore store(c, t);
  const auto expected = hit_and_miss_all(t, c, false);
  std::vector<std::vector<Mark>> got(8);
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < got.size(); ++k) {
    threads.emplace_back([&, k] { got[k] = follow_suggestions(store, c, k % c.size(), "t" + std::to_string(k)); });
  }
  for (auto& th : threads) th.join();
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == expected[k % c.size()].marks);
}

}  // TEST_SUITE
