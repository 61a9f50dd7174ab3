#include "semantify/neural_client.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "semantify/error.hpp"

namespace semantify {
namespace {

using nlohmann::json;

void apply_timeout(httplib::Client& client, double seconds) {
  const auto whole = static_cast<time_t>(seconds);
  const auto micros = static_cast<time_t>((seconds - static_cast<double>(whole)) * 1e6);
  client.set_connection_timeout(whole, micros);
  client.set_read_timeout(whole, micros);
  client.set_write_timeout(whole, micros);
}

RemoteError transport_error(httplib::Error err, const std::string& address, const char* what) {
  const auto kind = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
                        ? RemoteError::Kind::timeout
                        : RemoteError::Kind::connection;
  return RemoteError(kind, std::string(what) + " request to " + address + " failed: " +
                               httplib::to_string(err));
}

std::string service_message(const httplib::Result& res) {
  try {
    const auto body = json::parse(res->body);
    if (body.is_object()) {
      if (auto it = body.find("error"); it != body.end() && it->is_string()) {
        return it->get<std::string>();
      }
      if (auto it = body.find("detail"); it != body.end()) {
        return it->is_string() ? it->get<std::string>() : it->dump();
      }
    }
  } catch (const json::exception&) {
  }
  return res->body;
}

json parse_body(const httplib::Result& res, const std::string& address) {
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw RemoteError(RemoteError::Kind::protocol,
                      "service at " + address + " returned a non-JSON body: " + e.what());
  }
}

int major_version(const std::string& version) {
  try {
    return std::stoi(version);
  } catch (const std::exception&) {
    return -1;
  }
}

}  // namespace

void ServiceEndpoint::validate() const {
  if (!(timeout_seconds > 0.0) || !(train_timeout_seconds > 0.0)) {
    throw UsageError("service timeouts must be positive");
  }
  if (max_in_flight == 0) {
    throw UsageError("max_in_flight must be at least 1");
  }
  if (chunk_size == 0) {
    throw UsageError("chunk_size must be at least 1");
  }
}

void FairGate::acquire() {
  std::unique_lock lock(mutex_);
  const auto ticket = next_ticket_++;
  cv_.wait(lock, [&] { return serving_ == ticket && active_ < capacity_; });
  ++serving_;
  ++active_;
  peak_ = std::max(peak_, active_);
  cv_.notify_all();
}

void FairGate::release() {
  {
    std::lock_guard lock(mutex_);
    --active_;
  }
  cv_.notify_all();
}

std::size_t FairGate::peak() const {
  std::lock_guard lock(mutex_);
  return peak_;
}

NeuralClient::NeuralClient(ServiceEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  endpoint_.validate();
  std::string_view rest = endpoint_.base_address;
  if (rest.starts_with("http://")) {
    rest.remove_prefix(7);
  } else if (rest.find("://") != std::string_view::npos) {
    throw UsageError("only http:// endpoints are supported: " + endpoint_.base_address);
  }
  while (rest.ends_with('/')) {
    rest.remove_suffix(1);
  }
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    host_ = std::string(rest);
  } else {
    host_ = std::string(rest.substr(0, colon));
    try {
      port_ = std::stoi(std::string(rest.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("bad port in endpoint " + endpoint_.base_address);
    }
  }
  if (host_.empty()) {
    throw UsageError("endpoint has no host: " + endpoint_.base_address);
  }
  gate_ = std::make_shared<FairGate>(endpoint_.max_in_flight);
}

HealthStatus NeuralClient::health_check() const {
  HealthStatus status;
  for (std::size_t attempt = 0; attempt <= endpoint_.retry.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(endpoint_.retry.backoff * (1 << (attempt - 1)));
    }
    httplib::Client client(host_, port_);
    apply_timeout(client, endpoint_.timeout_seconds);
    auto res = client.Get("/healthz");
    if (!res) {
      status.message = "unreachable: " + endpoint_.base_address + " (" +
                       httplib::to_string(res.error()) + ")";
      continue;
    }
    status.reachable = true;
    if (res->status != 200) {
      status.status = "http " + std::to_string(res->status);
      status.message = service_message(res);
      return status;
    }
    try {
      const auto body = json::parse(res->body);
      status.status = body.value("status", "");
      status.version = body.value("version", "");
    } catch (const json::exception& e) {
      status.status = "malformed";
      status.message = e.what();
      return status;
    }
    if (major_version(status.version) != kSupportedServiceMajor) {
      status.version_warning = true;
      status.message = "service version " + status.version + " outside supported major " +
                       std::to_string(kSupportedServiceMajor);
    }
    return status;
  }
  return status;
}

RemoteModelHandle NeuralClient::train(std::span<const LabeledPairText> pairs,
                                      const Hyperparams& hyperparams,
                                      std::size_t false_per_assay) const {
  if (pairs.empty()) {
    throw UsageError("remote training needs at least one pair");
  }
  json body_pairs = json::array();
  for (const auto& p : pairs) {
    body_pairs.push_back(
        {{"assay_text", p.assay_text}, {"statement_text", p.statement_text}, {"label", p.label}});
  }
  const json body = {{"pairs", std::move(body_pairs)},
                     {"hyperparams",
                      {{"epochs", hyperparams.epochs},
                       {"learning_rate", hyperparams.learning_rate},
                       {"seed", hyperparams.seed},
                       {"max_sequence_length", hyperparams.max_sequence_length}}}};

  httplib::Client client(host_, port_);
  apply_timeout(client, endpoint_.train_timeout_seconds);
  gate_->acquire();
  auto res = client.Post("/v1/train", body.dump(), "application/json");
  gate_->release();
  if (!res) {
    throw transport_error(res.error(), endpoint_.base_address, "train");
  }
  if (res->status != 200) {
    throw RemoteError(RemoteError::Kind::service, "training failed at " + endpoint_.base_address +
                                                      " (http " + std::to_string(res->status) +
                                                      "): " + service_message(res));
  }
  const auto reply = parse_body(res, endpoint_.base_address);
  if (!reply.is_object() || !reply.contains("model_id") || !reply["model_id"].is_string() ||
      reply["model_id"].get<std::string>().empty()) {
    throw RemoteError(RemoteError::Kind::protocol, "train reply lacks a model_id");
  }
  return {reply["model_id"].get<std::string>(), false_per_assay, hyperparams.seed, hyperparams};
}

std::vector<double> NeuralClient::score_chunk(const std::string& model_id,
                                              std::span<const PairText> chunk) const {
  json pairs = json::array();
  for (const auto& p : chunk) {
    pairs.push_back({{"assay_text", p.assay_text}, {"statement_text", p.statement_text}});
  }
  const auto body = json{{"model_id", model_id}, {"pairs", std::move(pairs)}}.dump();

  std::optional<RemoteError> last;
  for (std::size_t attempt = 0; attempt <= endpoint_.retry.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(endpoint_.retry.backoff * (1 << (attempt - 1)));
    }
    httplib::Client client(host_, port_);
    apply_timeout(client, endpoint_.timeout_seconds);
    auto res = client.Post("/v1/score", body, "application/json");
    if (!res) {
      last = transport_error(res.error(), endpoint_.base_address, "score");
      continue;
    }
    if (res->status == 404) {
      throw RemoteError(RemoteError::Kind::unknown_model,
                        "unknown model " + model_id + ": " + service_message(res));
    }
    if (res->status >= 500) {
      last = RemoteError(RemoteError::Kind::service, "scoring failed at " +
                                                         endpoint_.base_address + ": " +
                                                         service_message(res));
      continue;
    }
    if (res->status != 200) {
      throw RemoteError(RemoteError::Kind::service,
                        "scoring rejected (http " + std::to_string(res->status) +
                            "): " + service_message(res));
    }
    const auto reply = parse_body(res, endpoint_.base_address);
    if (!reply.is_object() || !reply.contains("scores") || !reply["scores"].is_array()) {
      throw RemoteError(RemoteError::Kind::protocol, "score reply lacks a scores array");
    }
    const auto& scores = reply["scores"];
    if (scores.size() != chunk.size()) {
      throw RemoteError(RemoteError::Kind::protocol,
                        "service returned " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(chunk.size()) + " pairs");
    }
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& v : scores) {
      if (!v.is_number()) {
        throw RemoteError(RemoteError::Kind::protocol, "non-numeric score in reply");
      }
      const double d = v.get<double>();
      if (!std::isfinite(d) || d < 0.0 || d > 1.0) {
        throw RemoteError(RemoteError::Kind::protocol,
                          "score " + v.dump() + " outside [0, 1]");
      }
      out.push_back(d);
    }
    return out;
  }
  throw *last;
}

std::vector<double> NeuralClient::score(const RemoteModelHandle& handle,
                                        std::span<const PairText> batch) const {
  if (batch.empty()) {
    return {};
  }
  if (handle.model_id.empty()) {
    throw UsageError("remote model handle is empty");
  }
  const auto chunk = endpoint_.chunk_size;
  const auto chunks = (batch.size() + chunk - 1) / chunk;
  std::vector<double> out(batch.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const auto c = next.fetch_add(1);
      if (c >= chunks) {
        return;
      }
      {
        std::lock_guard lock(failure_mutex);
        if (failure) {
          return;
        }
      }
      const auto begin = c * chunk;
      const auto len = std::min(chunk, batch.size() - begin);
      gate_->acquire();
      try {
        const auto scores = score_chunk(handle.model_id, batch.subspan(begin, len));
        gate_->release();
        std::copy(scores.begin(), scores.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
      } catch (...) {
        gate_->release();
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };

  const auto workers = std::min(endpoint_.max_in_flight, chunks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return out;
}

// ---------------------------------------------------------------------------

RemoteModelHandle remote_train(const NeuralClient& client, std::span<const LabeledPair> pairs,
                               const Corpus& corpus, const Hyperparams& hyperparams,
                               std::size_t false_per_assay, StatementRendering rendering) {
  if (pairs.empty()) {
    throw UsageError("remote training needs at least one pair");
  }
  std::vector<LabeledPairText> texts;
  texts.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto pos = corpus.find(p.assay_id);
    if (!pos) {
      throw ValidationError("pair references assay " + p.assay_id + " outside the corpus");
    }
    texts.push_back({corpus[*pos].assay.description,
                     statement_text(corpus.statement(p.statement), rendering), p.label});
  }
  return client.train(texts, hyperparams, false_per_assay);
}

RemoteScorer::RemoteScorer(ServiceEndpoint endpoint, Hyperparams hyperparams,
                           StatementRendering rendering)
    : client_(std::move(endpoint)), hyperparams_(hyperparams), rendering_(rendering) {}

void RemoteScorer::train(const TrainingData& data) {
  const auto health = client_.health_check();
  if (!health.reachable) {
    throw RemoteError(RemoteError::Kind::connection, "cannot train: inference service " +
                                                          health.message);
  }
  handle_ = remote_train(client_, data.pairs, data.corpus, hyperparams_,
                         data.sampling.false_per_assay, rendering_);
  record_training_assays(data.corpus);
}

Score RemoteScorer::score(const Bioassay& assay, const SemanticStatement& statement) const {
  return score_batch(assay, std::span<const SemanticStatement>(&statement, 1)).front();
}

std::vector<Score> RemoteScorer::score_batch(const Bioassay& assay,
                                             std::span<const SemanticStatement> statements) const {
  require_trained();
  std::vector<PairText> batch;
  batch.reserve(statements.size());
  for (const auto& s : statements) {
    batch.push_back({assay.description, statement_text(s, rendering_)});
  }
  const auto values = client_.score(*handle_, batch);
  std::vector<Score> out;
  out.reserve(values.size());
  for (double v : values) {
    out.push_back({v, false});
  }
  return out;
}

RemoteScorer RemoteScorer::attach(ServiceEndpoint endpoint, RemoteModelHandle handle,
                                  std::vector<std::string> training_assays,
                                  StatementRendering rendering) {
  RemoteScorer s(std::move(endpoint), handle.hyperparams, rendering);
  s.handle_ = std::move(handle);
  s.set_training_assays(std::move(training_assays));
  return s;
}

}  // namespace semantify
