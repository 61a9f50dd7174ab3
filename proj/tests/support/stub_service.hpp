#pragma once

// In-process stand-in for the inference service, bound to a random local port.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace semantify::testing {

class StubService {
 public:
  using Json = nlohmann::json;
  // Maps a request's pairs to the reply body and status.
  using ScoreHandler = std::function<std::pair<int, Json>(const Json& request)>;

  StubService() {
    server_.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(Json{{"status", "ok"}, {"version", version}}.dump(), "application/json");
    });
    server_.Post("/v1/train", [this](const httplib::Request& req, httplib::Response& res) {
      ++train_requests;
      const auto body = Json::parse(req.body);
      {
        std::lock_guard lock(mutex_);
        last_train_ = body;
      }
      res.set_content(Json{{"model_id", "m-" + std::to_string(body["pairs"].size())}}.dump(),
                      "application/json");
    });
    server_.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      const auto now = ++in_flight_;
      {
        std::lock_guard lock(mutex_);
        peak_ = std::max(peak_, now);
      }
      ++score_requests;
      std::this_thread::sleep_for(score_delay);
      const auto body = Json::parse(req.body);
      std::pair<int, Json> reply;
      if (body["model_id"] != "m-known" && !body["model_id"].get<std::string>().starts_with("m-")) {
        reply = {404, Json{{"error", "unknown model"}}};
      } else {
        reply = score_handler ? score_handler(body) : default_scores(body);
      }
      res.status = reply.first;
      res.set_content(reply.second.dump(), "application/json");
      --in_flight_;
    });
    port = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubService() {
    server_.stop();
    thread_.join();
  }

  std::string address() const { return "http://127.0.0.1:" + std::to_string(port); }

  // Score = (length of statement_text mod 10) / 10, so reassembly order is checkable.
  static double expected_score(const std::string& statement_text) {
    return static_cast<double>(statement_text.size() % 10) / 10.0;
  }

  static std::pair<int, Json> default_scores(const Json& body) {
    Json scores = Json::array();
    for (const auto& p : body["pairs"]) {
      scores.push_back(expected_score(p["statement_text"].get<std::string>()));
    }
    return {200, Json{{"scores", scores}}};
  }

  int peak_in_flight() const {
    std::lock_guard lock(mutex_);
    return peak_;
  }
  Json last_train() const {
    std::lock_guard lock(mutex_);
    return last_train_;
  }

  int port = -1;
  std::string version = "1.2.0";
  ScoreHandler score_handler;
  std::chrono::milliseconds score_delay{0};
  std::atomic<int> score_requests{0};
  std::atomic<int> train_requests{0};

 private:
  httplib::Server server_;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::atomic<int> in_flight_{0};
  int peak_ = 0;
  Json last_train_;
};

}  // namespace semantify::testing
