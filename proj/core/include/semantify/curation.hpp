#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semantify/corpus.hpp"
#include "semantify/kgexport.hpp"
#include "semantify/scoring.hpp"

namespace semantify {

enum class Decision { approve, reject };

std::string to_string(Decision d);
Decision parse_decision(std::string_view name);

struct Suggestion {
  StatementId id{};
  SemanticStatement statement;
  double score = 0.0;
};

struct DecisionRecord {
  StatementId id{};
  Decision decision = Decision::approve;
  double score = 0.0;
};

struct CurationProgress {
  std::size_t decisions = 0;
  std::size_t approvals = 0;
  std::size_t remaining = 0;
};

// Backend state for interactive curation: every (session, assay) pair owns a
// decision log; suggestions walk the scorer's ranking over the full vocabulary,
// skipping decided statements. Thread-safe.
class CurationStore {
 public:
  class NotFound : public std::exception {
   public:
    explicit NotFound(std::string what) : what_(std::move(what)) {}
    const char* what() const noexcept override { return what_.c_str(); }

   private:
    std::string what_;
  };
  class Conflict : public NotFound {
   public:
    using NotFound::NotFound;
  };

  // `model` must outlive the store.
  CurationStore(const Corpus& corpus, const Scorer& model);

  struct AssaySummary {
    std::string id;
    std::string title;
  };
  std::vector<AssaySummary> assays() const;

  // nullopt when every statement has been decided. Throws NotFound for an
  // unknown assay.
  std::optional<Suggestion> next(std::string_view assay_id, std::string_view session);

  // Throws NotFound for an unknown assay or statement, Conflict when the
  // statement was already decided in this session.
  std::optional<Suggestion> decide(std::string_view assay_id, std::string_view session,
                                   StatementId statement, Decision decision);

  std::vector<DecisionRecord> log(std::string_view assay_id, std::string_view session) const;
  CurationProgress progress(std::string_view assay_id, std::string_view session) const;

  // Approved statements as curated triples.
  TripleSet triples(std::string_view assay_id, std::string_view session) const;

  static std::string title_for(const Bioassay& assay);

 private:
  struct SessionState {
    std::vector<DecisionRecord> log;
    std::set<StatementId> decided;
    std::size_t cursor = 0;  // first ranking position that may be undecided
  };

  std::size_t position_of(std::string_view assay_id) const;
  const std::vector<RankedId>& ranking_for(std::size_t position);
  std::optional<Suggestion> next_locked(std::size_t position, SessionState& state);

  const Corpus& corpus_;
  const Scorer& model_;
  std::vector<StatementId> all_ids_;
  mutable std::mutex mutex_;
  std::map<std::size_t, std::vector<RankedId>> rankings_;
  std::map<std::pair<std::string, std::size_t>, SessionState> sessions_;
};

}  // namespace semantify
