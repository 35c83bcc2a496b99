#include "dsre/screening_server.h"

#include <filesystem>

#include "dsre/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace dsre {

namespace {

using nlohmann::json;

void Reply(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response &res, int status, const std::string &what) {
  Reply(res, status, json{{"error", what}});
}

json ExampleJson(const Corpus &corpus, const Pattern &pattern) {
  if (pattern.examples.empty()) return nullptr;
  InstanceKey key;
  try {
    key = InstanceKey::Parse(pattern.examples.front());
  } catch (const Error &) {
    return nullptr;
  }
  const Sentence *sentence = corpus.FindSentence(key.sentence_id);
  if (sentence == nullptr) return nullptr;
  return json{{"instance_key", key.ToString()},
              {"tokens", sentence->tokens},
              {"text", sentence->Text()},
              {"subj", {key.subj.start, key.subj.end}},
              {"obj", {key.obj.start, key.obj.end}}};
}

json TemplatesJson(const TemplateSet &set, bool finalized) {
  json mined = json::array();
  for (const auto &t : set.templates) {
    if (t.provenance == Provenance::kMined) mined.push_back(t.text);
  }
  return json{{"relation", set.relation},
              {"general", set.general().text},
              {"mined", mined},
              {"finalized", finalized}};
}

}  // namespace

ScreeningServer::ScreeningServer(const Corpus &corpus, Options options)
    : corpus_(corpus),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  Routes();
}

ScreeningServer::~ScreeningServer() { Stop(); }

void ScreeningServer::AddRelation(ScreeningSession session, Template general) {
  std::string relation = session.relation();
  auto entry = std::make_unique<Entry>();
  entry->session = std::move(session);
  entry->general = std::move(general);
  if (entries_.emplace(relation, std::move(entry)).second) {
    order_.push_back(relation);
  }
}

ScreeningServer::Entry *ScreeningServer::Find(std::string &relation) {
  auto it = entries_.find(relation);
  if (it == entries_.end() && !relation.empty() && relation[0] != '/') {
    it = entries_.find("/" + relation);
    if (it != entries_.end()) relation = it->first;
  }
  return it == entries_.end() ? nullptr : it->second.get();
}

std::string ScreeningServer::TemplatePath(const std::string &relation) const {
  return (std::filesystem::path(options_.template_dir) /
          (RelationFileStem(relation) + ".json"))
      .string();
}

void ScreeningServer::FinalizeEntry(const std::string &relation,
                                    Entry &entry) {
  TemplateSet set = entry.session.Finalize(entry.general);
  if (!options_.template_dir.empty()) set.Save(TemplatePath(relation));
  entry.finalized = true;
}

void ScreeningServer::Routes() {
  auto &srv = *server_;

  srv.Get("/api/relations", [this](const httplib::Request &,
                                   httplib::Response &res) {
    json list = json::array();
    for (const auto &rel : order_) {
      Entry &e = *entries_.at(rel);
      std::lock_guard<std::mutex> lock(e.mu);
      list.push_back({{"relation", rel},
                      {"eligible", e.session.eligible()},
                      {"decided", e.session.decided()},
                      {"finalized", e.finalized}});
    }
    Reply(res, 200, json{{"relations", list}});
  });

  srv.Get(R"(/api/screening/(.+)/next)", [this](const httplib::Request &req,
                                                httplib::Response &res) {
    std::string relation = req.matches[1];
    Entry *e = Find(relation);
    if (e == nullptr) return ReplyError(res, 404, "unknown relation " + relation);
    std::lock_guard<std::mutex> lock(e->mu);
    json progress{{"decided", e->session.decided()},
                  {"eligible", e->session.eligible()}};
    auto next = e->session.Next();
    if (!next) {
      return Reply(res, 200, json{{"relation", relation},
                                  {"done", true},
                                  {"finalized", e->finalized},
                                  {"progress", progress}});
    }
    Reply(res, 200,
          json{{"relation", relation},
               {"done", false},
               {"pattern", next->pattern.Text()},
               {"frequency", next->pattern.frequency},
               {"rank", next->rank + 1},
               {"example", ExampleJson(corpus_, next->pattern)},
               {"progress", progress}});
  });

  srv.Post(R"(/api/screening/(.+)/decision)",
           [this](const httplib::Request &req, httplib::Response &res) {
    std::string relation = req.matches[1];
    Entry *e = Find(relation);
    if (e == nullptr) return ReplyError(res, 404, "unknown relation " + relation);
    std::string pattern;
    Decision decision;
    try {
      auto body = json::parse(req.body);
      pattern = body.at("pattern").get<std::string>();
      decision = ParseDecision(body.at("decision").get<std::string>());
    } catch (const std::exception &ex) {
      return ReplyError(res, 400, std::string("bad decision body: ") + ex.what());
    }
    std::unique_lock<std::mutex> lock(e->mu, std::try_to_lock);
    if (!lock.owns_lock()) {
      return ReplyError(res, 409, "another decision for " + relation +
                                      " is in progress");
    }
    try {
      e->session.Decide(pattern, decision);
    } catch (const ConflictError &ex) {
      return ReplyError(res, 409, ex.what());
    } catch (const SessionError &ex) {
      return ReplyError(res, 400, ex.what());
    }
    Reply(res, 200, json{{"relation", relation},
                         {"pattern", pattern},
                         {"decision", DecisionName(decision)},
                         {"decided", e->session.decided()},
                         {"eligible", e->session.eligible()}});
  });

  srv.Get(R"(/api/templates/(.+))", [this](const httplib::Request &req,
                                           httplib::Response &res) {
    std::string relation = req.matches[1];
    Entry *e = Find(relation);
    if (e == nullptr) return ReplyError(res, 404, "unknown relation " + relation);
    std::lock_guard<std::mutex> lock(e->mu);
    Reply(res, 200,
          TemplatesJson(e->session.Templates(e->general), e->finalized));
  });

  srv.Post(R"(/api/templates/(.+)/finalize)",
           [this](const httplib::Request &req, httplib::Response &res) {
    std::string relation = req.matches[1];
    Entry *e = Find(relation);
    if (e == nullptr) return ReplyError(res, 404, "unknown relation " + relation);
    json body;
    {
      std::lock_guard<std::mutex> lock(e->mu);
      try {
        if (!e->finalized) FinalizeEntry(relation, *e);
      } catch (const Error &ex) {
        return ReplyError(res, 500, ex.what());
      }
      body = TemplatesJson(e->session.Templates(e->general), true);
    }
    Reply(res, 200, body);
    if (options_.stop_when_finalized && AllFinalized()) server_->stop();
  });

  srv.Post("/api/close", [this](const httplib::Request &,
                                httplib::Response &res) {
    for (const auto &rel : order_) {
      Entry &e = *entries_.at(rel);
      std::lock_guard<std::mutex> lock(e.mu);
      try {
        if (!e.finalized) FinalizeEntry(rel, e);
      } catch (const Error &ex) {
        return ReplyError(res, 500, ex.what());
      }
    }
    Reply(res, 200, json{{"closed", true}});
    server_->stop();
  });

  if (!options_.ui_dir.empty() &&
      std::filesystem::is_directory(options_.ui_dir)) {
    srv.set_mount_point("/", options_.ui_dir);
  }
}

int ScreeningServer::Bind(const std::string &host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind screening server on " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind screening server on " + host + ":" +
                std::to_string(port));
  }
  return port;
}

void ScreeningServer::Serve() {
  if (!order_.empty() && AllFinalized() && options_.stop_when_finalized) return;
  server_->listen_after_bind();
}

void ScreeningServer::Stop() {
  if (server_ && server_->is_running()) server_->stop();
}

std::vector<TemplateSet> ScreeningServer::TemplateSetsSnapshot() const {
  std::vector<TemplateSet> out;
  for (const auto &rel : order_) {
    Entry &e = *entries_.at(rel);
    std::lock_guard<std::mutex> lock(e.mu);
    out.push_back(e.session.Templates(e.general));
  }
  return out;
}

bool ScreeningServer::AllFinalized() const {
  for (const auto &[_, e] : entries_) {
    std::lock_guard<std::mutex> lock(e->mu);
    if (!e->finalized) return false;
  }
  return true;
}

}  // namespace dsre
