#ifndef DSRE_SCREENING_SERVER_H_
#define DSRE_SCREENING_SERVER_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dsre/corpus.h"
#include "dsre/screening.h"

namespace httplib {
class Server;
}

namespace dsre {

// HTTP front end for manual screening, consumed by the review UI:
//   GET  /api/relations
//   GET  /api/screening/{relation}/next
//   POST /api/screening/{relation}/decision  {"pattern", "decision"}
//   GET  /api/templates/{relation}
//   POST /api/templates/{relation}/finalize
//   POST /api/close
// Relation ids may contain '/', either percent-encoded or literal; a
// literal id may drop its leading '/'. Each relation accepts one writer at a time: a decision arriving
// while another is being recorded is answered with 409.
class ScreeningServer {
 public:
  struct Options {
    std::string ui_dir;        // static assets; empty to serve none
    std::string template_dir;  // where finalized template files go
    // Stop serving once every relation is finalized.
    bool stop_when_finalized = true;
  };

  ScreeningServer(const Corpus &corpus, Options options);
  ~ScreeningServer();

  ScreeningServer(const ScreeningServer &) = delete;
  ScreeningServer &operator=(const ScreeningServer &) = delete;

  void AddRelation(ScreeningSession session, Template general);

  // Binds and returns the port (pass 0 for any free port).
  int Bind(const std::string &host, int port);
  // Serves until Stop(), /api/close, or the last finalize.
  void Serve();
  void Stop();

  // Template sets of every relation, finalized or not, in insertion order.
  std::vector<TemplateSet> TemplateSetsSnapshot() const;
  bool AllFinalized() const;

  // Path of the template file written for a relation on finalize.
  std::string TemplatePath(const std::string &relation) const;

 private:
  struct Entry {
    ScreeningSession session;
    Template general;
    bool finalized = false;
    std::mutex mu;
  };

  void Routes();
  // Canonicalizes `relation` when it matched without its leading '/'.
  Entry *Find(std::string &relation);
  void FinalizeEntry(const std::string &relation, Entry &entry);

  const Corpus &corpus_;
  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::vector<std::string> order_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
};

}  // namespace dsre

#endif  // DSRE_SCREENING_SERVER_H_
