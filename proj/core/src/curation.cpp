#include "semantify/curation.hpp"

#include <algorithm>

#include "semantify/error.hpp"
#include "semantify/text.hpp"

namespace semantify {

std::string to_string(Decision d) {
  return d == Decision::approve ? "approve" : "reject";
}

Decision parse_decision(std::string_view name) {
  if (name == "approve") return Decision::approve;
  if (name == "reject") return Decision::reject;
  throw UsageError("decision must be \"approve\" or \"reject\", got \"" + std::string(name) + "\"");
}

CurationStore::CurationStore(const Corpus& corpus, const Scorer& model)
    : corpus_(corpus), model_(model) {
  if (!model.trained()) {
    throw UsageError("curation needs a trained scorer");
  }
  all_ids_.resize(corpus.vocabulary().size());
  for (std::size_t i = 0; i < all_ids_.size(); ++i) {
    all_ids_[i] = static_cast<StatementId>(i);
  }
}

std::string CurationStore::title_for(const Bioassay& assay) {
  constexpr std::size_t kMax = 80;
  auto t = text::normalize_whitespace(assay.description);
  if (const auto dot = t.find(". "); dot != std::string::npos && dot < kMax) {
    return t.substr(0, dot + 1);
  }
  if (t.size() > kMax) {
    t.resize(kMax - 3);
    t += "...";
  }
  return t;
}

std::vector<CurationStore::AssaySummary> CurationStore::assays() const {
  std::vector<AssaySummary> out;
  out.reserve(corpus_.size());
  for (const auto& a : corpus_.assays()) {
    out.push_back({a.assay.id, title_for(a.assay)});
  }
  return out;
}

std::size_t CurationStore::position_of(std::string_view assay_id) const {
  const auto pos = corpus_.find(assay_id);
  if (!pos) {
    throw NotFound("unknown assay " + std::string(assay_id));
  }
  return *pos;
}

const std::vector<RankedId>& CurationStore::ranking_for(std::size_t position) {
  auto it = rankings_.find(position);
  if (it == rankings_.end()) {
    it = rankings_
             .emplace(position, rank_ids(model_, corpus_[position].assay, corpus_.vocabulary(),
                                         all_ids_))
             .first;
  }
  return it->second;
}

std::optional<Suggestion> CurationStore::next_locked(std::size_t position, SessionState& state) {
  const auto& ranking = ranking_for(position);
  while (state.cursor < ranking.size() && state.decided.contains(ranking[state.cursor].id)) {
    ++state.cursor;
  }
  if (state.cursor == ranking.size()) {
    return std::nullopt;
  }
  const auto& r = ranking[state.cursor];
  return Suggestion{r.id, corpus_.statement(r.id), r.score};
}

namespace {

void require_session(std::string_view session) {
  if (session.empty()) {
    throw UsageError("a session id is required");
  }
}

}  // namespace

std::optional<Suggestion> CurationStore::next(std::string_view assay_id, std::string_view session) {
  require_session(session);
  std::lock_guard lock(mutex_);
  const auto pos = position_of(assay_id);
  return next_locked(pos, sessions_[{std::string(session), pos}]);
}

std::optional<Suggestion> CurationStore::decide(std::string_view assay_id,
                                                std::string_view session, StatementId statement,
                                                Decision decision) {
  require_session(session);
  std::lock_guard lock(mutex_);
  const auto pos = position_of(assay_id);
  if (to_index(statement) >= all_ids_.size()) {
    throw NotFound("unknown statement " + std::to_string(to_index(statement)));
  }
  auto& state = sessions_[{std::string(session), pos}];
  if (state.decided.contains(statement)) {
    throw Conflict("statement " + std::to_string(to_index(statement)) +
                   " already decided in this session");
  }
  const auto& ranking = ranking_for(pos);
  const auto it = std::find_if(ranking.begin(), ranking.end(),
                               [&](const RankedId& r) { return r.id == statement; });
  state.log.push_back({statement, decision, it == ranking.end() ? 0.0 : it->score});
  state.decided.insert(statement);
  return next_locked(pos, state);
}

std::vector<DecisionRecord> CurationStore::log(std::string_view assay_id,
                                               std::string_view session) const {
  std::lock_guard lock(mutex_);
  const auto pos = position_of(assay_id);
  const auto it = sessions_.find({std::string(session), pos});
  return it == sessions_.end() ? std::vector<DecisionRecord>{} : it->second.log;
}

CurationProgress CurationStore::progress(std::string_view assay_id,
                                         std::string_view session) const {
  const auto entries = log(assay_id, session);
  CurationProgress p;
  p.decisions = entries.size();
  p.approvals = static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const auto& r) { return r.decision == Decision::approve; }));
  p.remaining = all_ids_.size() - p.decisions;
  return p;
}

TripleSet CurationStore::triples(std::string_view assay_id, std::string_view session) const {
  const auto entries = log(assay_id, session);
  TripleSet set{std::string(assay_id)};
  for (const auto& r : entries) {
    if (r.decision == Decision::approve) {
      set.insert(corpus_.statement(r.id), Provenance::curated);
    }
  }
  return set;
}

}  // namespace semantify
