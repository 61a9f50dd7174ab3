#include <doctest.h>

#include <sstream>

#include "semantify/corpus.hpp"
#include "semantify/corpus_io.hpp"
#include "semantify/error.hpp"
#include "support/test_support.hpp"

using namespace semantify;
using semantify::testing::data_path;
using semantify::testing::load_fixture;
using semantify::testing::random_corpus;

TEST_SUITE("corpus") {

TEST_CASE("statements are canonicalized by trimming and collapsing whitespace") {
  const auto s = make_statement("  has   assay\tformat ", "Biochemical \n format");
  CHECK(s.predicate == "has assay format");
  CHECK(s.object == "Biochemical format");
  CHECK_THROWS_AS(make_statement("   ", "x"), ValidationError);
  CHECK_THROWS_AS(make_statement("p", ""), ValidationError);
}

TEST_CASE("three-assay fixture: vocabulary and frequencies match a hand count") {
  const auto c = load_fixture("fixture3.jsonl");
  REQUIRE(c.size() == 3);
  CHECK(c.vocabulary().size() == 5);
  const auto freq = [&](const char* p, const char* o) {
    return c.vocabulary().frequency(*c.vocabulary().find(make_statement(p, o)));
  };
  CHECK(freq("has assay format", "biochemical format") == 3);
  CHECK(freq("assay measurement type", "endpoint assay") == 2);
  CHECK(freq("has detection method", "fluorescence intensity") == 1);
  CHECK(freq("has assay format", "protein format") == 2);
  CHECK(freq("has organism", "homo sapiens") == 1);
  CHECK(c[1].assay.id == "A2");
  CHECK(c.find("A3") == 2u);
  CHECK_FALSE(c.find("nope").has_value());
}

TEST_CASE("numeric ids load as strings") {
  const auto c = load_fixture("aid346.jsonl");
  CHECK(c[0].assay.id == "346");
  CHECK(c[0].length() == 4);
}

TEST_CASE("load errors") {
  SUBCASE("empty file is a parse failure") {
    CHECK_THROWS_AS(load_fixture("empty.jsonl"), ParseError);
  }
  SUBCASE("malformed record reports its line") {
    try {
      load_fixture("malformed.jsonl");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.locator().ends_with(":2"));
    }
  }
  SUBCASE("empty description") {
    CHECK_THROWS_AS(load_fixture("empty_description.jsonl"), ValidationError);
  }
  SUBCASE("assay without statements") {
    CHECK_THROWS_AS(load_fixture("zero_statements.jsonl"), ValidationError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_fixture("does-not-exist.jsonl"), IoError);
  }
  SUBCASE("duplicate assay ids") {
    std::istringstream in(
        "{\"id\":\"X\",\"description\":\"a\",\"statements\":[{\"predicate\":\"p\",\"object\":\"o\"}]}\n"
        "{\"id\":\"X\",\"description\":\"b\",\"statements\":[{\"predicate\":\"p\",\"object\":\"o\"}]}\n");
    CHECK_THROWS_AS(read_corpus_jsonl(in), ValidationError);
  }
  SUBCASE("missing field") {
    std::istringstream in("{\"id\":\"X\",\"statements\":[]}\n");
    CHECK_THROWS_AS(read_corpus_jsonl(in), ParseError);
  }
}

TEST_CASE("duplicate statements within an assay collapse with a warning count") {
  const auto c = load_fixture("duplicates.jsonl");
  CHECK(c[0].length() == 2);
  CHECK(c.diagnostics().duplicate_statements_collapsed == 1);
}

TEST_CASE("two-file importer matches the JSONL dialect") {
  const auto jsonl = load_fixture("fixture3.jsonl");
  const auto two = load_corpus(data_path("fixture3.descriptions.tsv"), CorpusFormat::two_file,
                               data_path("fixture3.annotations.tsv"));
  CHECK(two.equivalent(jsonl));

  std::istringstream desc("A1\tdesc\n");
  std::istringstream ann("A9\tp\to\n");
  CHECK_THROWS_AS(read_corpus_two_file(desc, ann), ParseError);
}

TEST_CASE("load -> serialize -> load round-trips") {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    const auto c = random_corpus(seed, 12, 30, 1, 9);
    std::stringstream buf;
    write_corpus_jsonl(buf, c);
    const auto back = read_corpus_jsonl(buf);
    CHECK(back.equivalent(c));
  }
}

TEST_CASE("vocabulary frequencies equal a brute-force recount") {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    const auto c = random_corpus(seed, 15, 25, 1, 10);
    std::map<SemanticStatement, std::size_t> recount;
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (const auto& s : semantify::testing::gold_contents(c, i)) {
        ++recount[s];
      }
    }
    for (std::size_t i = 0; i < c.vocabulary().size(); ++i) {
      const auto id = static_cast<StatementId>(i);
      CHECK(c.vocabulary().frequency(id) == recount[c.statement(id)]);
    }
  }
}

TEST_CASE("filter_noninformative") {
  const auto c = load_fixture("fixture3.jsonl");

  SUBCASE("empty policy is the identity") {
    const auto out = filter_noninformative(c, {});
    CHECK(out.equivalent(c));
    CHECK(out.vocabulary().size() == c.vocabulary().size());
  }
  SUBCASE("ubiquity rule drops a statement present in every assay") {
    FilterPolicy p;
    p.ubiquity_threshold = 0.99;
    const auto out = filter_noninformative(c, p);
    CHECK_FALSE(out.vocabulary().find(make_statement("has assay format", "biochemical format")));
    CHECK(out.vocabulary().size() == 4);
    CHECK(out.size() == 3);
    CHECK(out[0].length() == 1);
  }
  SUBCASE("stoplist rules prune annotations and drop emptied assays") {
    FilterPolicy p;
    p.stop_predicates = {"assay measurement type"};
    p.stop_statements = {make_statement("has assay format", "biochemical format")};
    const auto out = filter_noninformative(c, p);
    CHECK(out.size() == 2);  // A1 only had the two removed statements
    CHECK_FALSE(out.find("A1").has_value());
    CHECK(out.diagnostics().assays_dropped_empty == 1);
    CHECK(out.diagnostics().statements_removed == 2);
  }
  SUBCASE("stop_objects") {
    FilterPolicy p;
    p.stop_objects = {"homo sapiens"};
    const auto out = filter_noninformative(c, p);
    CHECK(out.vocabulary().size() == 4);
    CHECK(out[2].length() == 3);
  }
}

TEST_CASE("filter_noninformative is idempotent") {
  for (std::uint32_t seed = 1; seed <= 40; ++seed) {
    const auto c = random_corpus(seed, 10, 12, 1, 6);
    FilterPolicy p;
    p.ubiquity_threshold = 0.3 + 0.01 * seed;
    p.stop_predicates = {"p" + std::to_string(seed % 7)};
    Corpus once;
    try {
      once = filter_noninformative(c, p);
    } catch (const ValidationError&) {
      continue;  // everything filtered away
    }
    const auto twice = filter_noninformative(once, p);
    CHECK(twice.equivalent(once));
  }
}

TEST_CASE("filter policy files") {
  std::istringstream in(R"({"stop_statements":[{"predicate":"a","object":" b "}],
                            "stop_predicates":["x"], "ubiquity_threshold": 0.9})");
  const auto p = read_filter_policy(in);
  REQUIRE(p.stop_statements.size() == 1);
  CHECK(p.stop_statements[0].object == "b");
  CHECK(p.ubiquity_threshold == doctest::Approx(0.9));
  std::istringstream bad(R"({"ubiquity_threshold": 3})");
  CHECK_THROWS_AS(read_filter_policy(bad), ParseError);
  const auto shipped = load_filter_policy(std::filesystem::path(SEMANTIFY_SOURCE_DIR) / "data" /
                                          "default_filter_policy.json");
  CHECK(shipped.empty());
}

TEST_CASE("corpus_stats") {
  SUBCASE("fixture lengths {2,3,4}") {
    const auto s = corpus_stats(load_fixture("fixture3.jsonl"));
    CHECK(s.assay_count == 3);
    CHECK(s.vocabulary_size == 5);
    CHECK(s.min_length == 2);
    CHECK(s.max_length == 4);
    CHECK(s.mean_length == doctest::Approx(3.0));
    CHECK(s.length_histogram == std::map<std::size_t, std::size_t>{{2, 1}, {3, 1}, {4, 1}});
  }
  SUBCASE("single assay with one statement") {
    std::istringstream in(
        R"({"id":"S","description":"d","statements":[{"predicate":"p","object":"o"}]})");
    const auto s = corpus_stats(read_corpus_jsonl(in));
    CHECK(s.min_length == 1);
    CHECK(s.max_length == 1);
    CHECK(s.mean_length == 1.0);
  }
  SUBCASE("empty corpus") {
    CHECK_THROWS_AS(corpus_stats(Corpus{}), UsageError);
  }
}

TEST_CASE("split_folds") {
  SUBCASE("three assays, three folds") {
    const auto c = load_fixture("fixture3.jsonl");
    const auto folds = split_folds(c, 3, 7);
    for (const auto& f : folds) {
      CHECK(f.test_positions.size() == 1);
      CHECK(f.train_positions.size() == 2);
    }
  }
  SUBCASE("fixed seed is deterministic, different seeds differ") {
    const auto c = random_corpus(3, 10, 20, 1, 5);
    const auto a = split_folds(c, 3, 42);
    const auto b = split_folds(c, 3, 42);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a[i].test_positions == b[i].test_positions);
      CHECK(a[i].train_positions == b[i].train_positions);
    }
    bool any_diff = false;
    for (std::uint64_t s = 0; s < 5 && !any_diff; ++s) {
      any_diff = split_folds(c, 3, s)[0].test_positions != a[0].test_positions;
    }
    CHECK(any_diff);
  }
  SUBCASE("errors") {
    const auto c = load_fixture("fixture3.jsonl");
    CHECK_THROWS_AS(split_folds(c, 1, 0), UsageError);
    CHECK_THROWS_AS(split_folds(c, 4, 0), UsageError);
  }
  SUBCASE("fold corpora share the statement table and recount frequencies") {
    const auto c = load_fixture("fixture3.jsonl");
    const auto folds = materialize_folds(c, split_folds(c, 3, 1));
    for (const auto& f : folds) {
      CHECK(f.train.vocabulary().same_table(c.vocabulary()));
      std::size_t total = 0;
      for (auto v : f.test.vocabulary().frequencies()) total += v;
      CHECK(total == f.test[0].length());
    }
  }
}

}  // TEST_SUITE
