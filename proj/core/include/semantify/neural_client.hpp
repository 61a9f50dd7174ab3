#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semantify/corpus.hpp"
#include "semantify/pairgen.hpp"
#include "semantify/scoring.hpp"

namespace semantify {

struct RetryPolicy {
  std::size_t retries = 2;
  std::chrono::milliseconds backoff{200};
};

struct ServiceEndpoint {
  // "http://host:port"; a bare "host:port" is accepted too.
  std::string base_address = "http://127.0.0.1:8500";
  double timeout_seconds = 60.0;
  // Training is synchronous on the wire, so it gets its own, longer budget.
  double train_timeout_seconds = 6 * 3600.0;
  std::size_t max_in_flight = 4;
  std::size_t chunk_size = 64;
  RetryPolicy retry;

  // Throws UsageError on a non-positive timeout, zero in-flight bound or
  // zero chunk size.
  void validate() const;
};

// Training hyperparameters forwarded verbatim to the service.
struct Hyperparams {
  std::size_t epochs = 2;
  double learning_rate = 2e-5;
  std::uint64_t seed = 0;
  std::size_t max_sequence_length = 512;
};

struct RemoteModelHandle {
  std::string model_id;
  std::size_t false_per_assay = 0;
  std::uint64_t seed = 0;
  Hyperparams hyperparams;
};

struct HealthStatus {
  bool reachable = false;
  std::string status;
  std::string version;
  // Reachable, but the service reports a protocol version outside the
  // supported major version.
  bool version_warning = false;
  std::string message;
};

struct PairText {
  std::string assay_text;
  std::string statement_text;
};

struct LabeledPairText {
  std::string assay_text;
  std::string statement_text;
  bool label = false;
};

// Major protocol version this client speaks.
inline constexpr int kSupportedServiceMajor = 1;

// FIFO admission gate: at most `capacity` holders, waiters served in arrival order.
class FairGate {
 public:
  explicit FairGate(std::size_t capacity) : capacity_(capacity) {}

  void acquire();
  void release();
  std::size_t peak() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t capacity_;
  std::size_t active_ = 0;
  std::size_t peak_ = 0;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t serving_ = 0;
};

// HTTP client for the inference service. Shareable across threads; the
// endpoint's in-flight bound applies across all callers.
class NeuralClient {
 public:
  explicit NeuralClient(ServiceEndpoint endpoint);

  const ServiceEndpoint& endpoint() const noexcept { return endpoint_; }

  // Never throws for an unreachable service; that is reported in the status.
  HealthStatus health_check() const;

  // Not retried. Throws UsageError for an empty pair list (no request sent).
  RemoteModelHandle train(std::span<const LabeledPairText> pairs, const Hyperparams& hyperparams,
                          std::size_t false_per_assay = 0) const;

  // Chunks the batch, runs chunks concurrently within the in-flight bound and
  // reassembles in order. A score-count mismatch or a value outside [0, 1]
  // raises RemoteError::protocol.
  std::vector<double> score(const RemoteModelHandle& handle,
                            std::span<const PairText> batch) const;

  std::size_t peak_in_flight() const { return gate_->peak(); }

 private:
  std::vector<double> score_chunk(const std::string& model_id,
                                  std::span<const PairText> chunk) const;

  ServiceEndpoint endpoint_;
  std::string host_;
  int port_ = 80;
  std::shared_ptr<FairGate> gate_;
};

// Resolves pair texts through `corpus` and trains remotely.
RemoteModelHandle remote_train(const NeuralClient& client, std::span<const LabeledPair> pairs,
                               const Corpus& corpus, const Hyperparams& hyperparams,
                               std::size_t false_per_assay = 0,
                               StatementRendering rendering = StatementRendering::space);

// Scorer contract over the remote service.
class RemoteScorer final : public Scorer {
 public:
  RemoteScorer(ServiceEndpoint endpoint, Hyperparams hyperparams,
               StatementRendering rendering = StatementRendering::space);

  std::string kind() const override { return "remote"; }
  void train(const TrainingData& data) override;
  bool trained() const override { return handle_.has_value(); }
  Score score(const Bioassay& assay, const SemanticStatement& statement) const override;
  std::vector<Score> score_batch(const Bioassay& assay,
                                 std::span<const SemanticStatement> statements) const override;
  void save(std::ostream& out) const override;

  const NeuralClient& client() const noexcept { return client_; }
  const std::optional<RemoteModelHandle>& handle() const noexcept { return handle_; }

  static RemoteScorer attach(ServiceEndpoint endpoint, RemoteModelHandle handle,
                             std::vector<std::string> training_assays,
                             StatementRendering rendering = StatementRendering::space);

 private:
  NeuralClient client_;
  Hyperparams hyperparams_;
  StatementRendering rendering_;
  std::optional<RemoteModelHandle> handle_;
};

}  // namespace semantify
