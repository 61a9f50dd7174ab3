#include <istream>
#include <ostream>

#include <json.hpp>

#include "semantify/error.hpp"
#include "semantify/neural_client.hpp"
#include "semantify/scoring.hpp"

namespace semantify {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "semantify-model";

json header(const Scorer& model) {
  return {{"format", kFormatName},
          {"version", kModelFormatVersion},
          {"kind", model.kind()},
          {"training_assays", model.training_assays()}};
}

void write(std::ostream& out, const json& doc) {
  out << doc.dump(2) << '\n';
}

SemanticStatement statement_of(const json& j) {
  return make_statement(j.at("predicate").get<std::string>(), j.at("object").get<std::string>());
}

json endpoint_json(const ServiceEndpoint& e) {
  return {{"base_address", e.base_address},
          {"timeout_seconds", e.timeout_seconds},
          {"train_timeout_seconds", e.train_timeout_seconds},
          {"max_in_flight", e.max_in_flight},
          {"chunk_size", e.chunk_size},
          {"retries", e.retry.retries},
          {"backoff_ms", e.retry.backoff.count()}};
}

ServiceEndpoint endpoint_from(const json& j) {
  ServiceEndpoint e;
  e.base_address = j.at("base_address").get<std::string>();
  e.timeout_seconds = j.at("timeout_seconds").get<double>();
  e.train_timeout_seconds = j.at("train_timeout_seconds").get<double>();
  e.max_in_flight = j.at("max_in_flight").get<std::size_t>();
  e.chunk_size = j.at("chunk_size").get<std::size_t>();
  e.retry.retries = j.at("retries").get<std::size_t>();
  e.retry.backoff = std::chrono::milliseconds(j.at("backoff_ms").get<long long>());
  return e;
}

json hyperparams_json(const Hyperparams& h) {
  return {{"epochs", h.epochs},
          {"learning_rate", h.learning_rate},
          {"seed", h.seed},
          {"max_sequence_length", h.max_sequence_length}};
}

Hyperparams hyperparams_from(const json& j) {
  Hyperparams h;
  h.epochs = j.at("epochs").get<std::size_t>();
  h.learning_rate = j.at("learning_rate").get<double>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.max_sequence_length = j.at("max_sequence_length").get<std::size_t>();
  return h;
}

}  // namespace

void FrequencyModel::save(std::ostream& out) const {
  require_trained();
  auto doc = header(*this);
  doc["decision_rank"] = decision_rank_;
  json entries = json::array();
  for (const auto& e : ranking_) {
    entries.push_back(
        {{"predicate", e.statement.predicate}, {"object", e.statement.object}, {"frequency", e.frequency}});
  }
  doc["statements"] = std::move(entries);
  write(out, doc);
}

void LexicalModel::save(std::ostream& out) const {
  require_trained();
  auto doc = header(*this);
  doc["hyperparams"] = {{"epochs", hyperparams_.epochs},
                        {"learning_rate", hyperparams_.learning_rate},
                        {"l2", hyperparams_.l2},
                        {"seed", hyperparams_.seed}};
  doc["weights"] = weights_;
  json entries = json::array();
  for (const auto& [s, info] : statements_) {
    entries.push_back({{"predicate", s.predicate}, {"object", s.object}, {"prior", info.prior}});
  }
  doc["statements"] = std::move(entries);
  write(out, doc);
}

void RemoteScorer::save(std::ostream& out) const {
  require_trained();
  auto doc = header(*this);
  doc["endpoint"] = endpoint_json(client_.endpoint());
  doc["rendering"] = rendering_ == StatementRendering::arrow ? "arrow" : "space";
  doc["handle"] = {{"model_id", handle_->model_id},
                   {"false_per_assay", handle_->false_per_assay},
                   {"seed", handle_->seed},
                   {"hyperparams", hyperparams_json(handle_->hyperparams)}};
  write(out, doc);
}

std::unique_ptr<Scorer> load_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormatName) {
    throw ParseError("not a semantify model file");
  }
  const auto version = doc.value("version", -1);
  if (version != kModelFormatVersion) {
    throw ParseError("unsupported model file version " + std::to_string(version) +
                     " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
  }
  try {
    const auto kind = doc.at("kind").get<std::string>();
    auto training = doc.at("training_assays").get<std::vector<std::string>>();
    if (kind == "frequency") {
      std::vector<FrequencyModel::Entry> entries;
      for (const auto& e : doc.at("statements")) {
        entries.push_back({statement_of(e), e.at("frequency").get<std::size_t>()});
      }
      return std::make_unique<FrequencyModel>(FrequencyModel::from_entries(
          std::move(entries), doc.at("decision_rank").get<std::size_t>(), std::move(training)));
    }
    if (kind == "lexical") {
      const auto& h = doc.at("hyperparams");
      LexicalHyperparams hp{h.at("epochs").get<std::size_t>(), h.at("learning_rate").get<double>(),
                            h.at("l2").get<double>(), h.at("seed").get<std::uint64_t>()};
      const auto w = doc.at("weights").get<std::vector<double>>();
      if (w.size() != LexicalModel::kFeatureCount) {
        throw ParseError("lexical model has " + std::to_string(w.size()) + " weights, expected " +
                         std::to_string(LexicalModel::kFeatureCount));
      }
      LexicalModel::Weights weights{};
      std::copy(w.begin(), w.end(), weights.begin());
      std::vector<LexicalModel::KnownStatement> known;
      for (const auto& e : doc.at("statements")) {
        known.push_back({statement_of(e), e.at("prior").get<double>()});
      }
      return std::make_unique<LexicalModel>(
          LexicalModel::from_state(hp, weights, std::move(known), std::move(training)));
    }
    if (kind == "remote") {
      const auto& h = doc.at("handle");
      RemoteModelHandle handle{h.at("model_id").get<std::string>(),
                               h.at("false_per_assay").get<std::size_t>(),
                               h.at("seed").get<std::uint64_t>(),
                               hyperparams_from(h.at("hyperparams"))};
      const auto rendering = doc.value("rendering", "space") == "arrow"
                                 ? StatementRendering::arrow
                                 : StatementRendering::space;
      return std::make_unique<RemoteScorer>(RemoteScorer::attach(
          endpoint_from(doc.at("endpoint")), std::move(handle), std::move(training), rendering));
    }
    throw ParseError("unknown model kind \"" + kind + "\"");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace semantify
