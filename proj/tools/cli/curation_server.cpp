#include "cli/curation_server.hpp"

#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "semantify/error.hpp"
#include "semantify/kgexport.hpp"

namespace semantify::cli {
namespace {

using nlohmann::json;

json suggestion_json(const std::optional<Suggestion>& s) {
  if (!s) {
    return nullptr;
  }
  return {{"statement_id", to_index(s->id)},
          {"predicate", s->statement.predicate},
          {"object", s->statement.object},
          {"score", s->score}};
}

json progress_json(const CurationProgress& p) {
  return {{"decisions", p.decisions}, {"approvals", p.approvals}, {"remaining", p.remaining}};
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", message}});
}

std::string session_param(const httplib::Request& req) {
  return req.has_param("session") ? req.get_param_value("session") : std::string{};
}

// Maps store and library exceptions onto HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const CurationStore::Conflict& e) {
    reply_error(res, 409, e.what());
  } catch (const CurationStore::NotFound& e) {
    reply_error(res, 404, e.what());
  } catch (const UsageError& e) {
    reply_error(res, 400, e.what());
  } catch (const json::exception& e) {
    reply_error(res, 400, std::string("malformed request body: ") + e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, e.what());
  }
}

}  // namespace

struct CurationServer::Impl {
  Impl(const Corpus& c, const Scorer& m) : corpus(c), model(m), store(c, m) {}

  const Corpus& corpus;
  const Scorer& model;
  CurationStore store;
  httplib::Server server;
};

CurationServer::CurationServer(const Corpus& corpus, const Scorer& model)
    : impl_(std::make_unique<Impl>(corpus, model)) {
  auto& svr = impl_->server;
  auto& store = impl_->store;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  svr.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200,
          {{"status", "ok"}, {"assays", impl_->corpus.size()}, {"model", impl_->model.kind()}});
  });

  svr.Get("/api/assays", [&store](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& a : store.assays()) {
      list.push_back({{"id", a.id}, {"title", a.title}});
    }
    reply(res, 200, list);
  });

  svr.Get(R"(/api/assays/([^/]+)/next)", [&store](const httplib::Request& req,
                                                  httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      const auto session = session_param(req);
      const auto next = store.next(id, session);
      reply(res, 200,
            {{"assay_id", id},
             {"session", session},
             {"suggestion", suggestion_json(next)},
             {"progress", progress_json(store.progress(id, session))}});
    });
  });

  svr.Post(R"(/api/assays/([^/]+)/decision)", [&store](const httplib::Request& req,
                                                       httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      const auto body = json::parse(req.body);
      const auto session = body.at("session").get<std::string>();
      const auto statement = static_cast<StatementId>(body.at("statement_id").get<std::uint32_t>());
      const auto decision = parse_decision(body.at("decision").get<std::string>());
      const auto next = store.decide(id, session, statement, decision);
      reply(res, 200,
            {{"acknowledged", true},
             {"assay_id", id},
             {"statement_id", to_index(statement)},
             {"decision", to_string(decision)},
             {"next", suggestion_json(next)},
             {"progress", progress_json(store.progress(id, session))}});
    });
  });

  svr.Get(R"(/api/assays/([^/]+)/triples)", [&store](const httplib::Request& req,
                                                     httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      const auto set = store.triples(id, session_param(req));
      if (req.has_param("format") && req.get_param_value("format") == "tsv") {
        std::ostringstream out;
        write_triples(out, set);
        res.set_content(out.str(), "text/tab-separated-values");
        return;
      }
      json triples = json::array();
      for (const auto& t : set.triples()) {
        triples.push_back({{"subject", t.subject},
                           {"predicate", t.predicate},
                           {"object", t.object},
                           {"provenance", to_string(t.provenance)}});
      }
      reply(res, 200, {{"assay_id", id}, {"subject", set.subject()}, {"triples", triples}});
    });
  });
}

CurationServer::~CurationServer() {
  stop();
}

int CurationServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  return bound;
}

void CurationServer::listen() {
  impl_->server.listen_after_bind();
}

void CurationServer::wait_until_ready() {
  impl_->server.wait_until_ready();
}

void CurationServer::stop() {
  impl_->server.stop();
}

CurationStore& CurationServer::store() {
  return impl_->store;
}

}  // namespace semantify::cli
