#pragma once

#include <memory>
#include <string>

#include "semantify/corpus.hpp"
#include "semantify/curation.hpp"
#include "semantify/scoring.hpp"

namespace semantify::cli {

// HTTP backend for the curation UI.
//
//   GET  /healthz
//   GET  /api/assays
//   GET  /api/assays/{id}/next?session=S
//   POST /api/assays/{id}/decision   {"statement_id", "decision", "session"}
//   GET  /api/assays/{id}/triples?session=S[&format=tsv]
class CurationServer {
 public:
  // Both references must outlive the server.
  CurationServer(const Corpus& corpus, const Scorer& model);
  ~CurationServer();

  CurationServer(const CurationServer&) = delete;
  CurationServer& operator=(const CurationServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws IoError.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void wait_until_ready();
  void stop();

  CurationStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace semantify::cli
