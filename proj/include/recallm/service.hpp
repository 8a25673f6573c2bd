#pragma once

#include <memory>
#include <string>

#include "recallm/engine.hpp"

namespace httplib {
class Server;
}

namespace recallm {

// JSON-over-HTTP surface of a MemoryEngine.
//
//   POST /ingest        {"text": ...}                 -> UpdateReport
//   POST /ask           {"question": ..., "mode": ...} -> trace
//   GET  /stats                                        -> {counter, nodes, edges, chunks}
//   GET  /graph/export                                 -> graph snapshot
//
// Errors are {"error": kind, "detail": message} with a 4xx or 5xx status.
class Service {
 public:
  explicit Service(MemoryEngine& engine);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); blocks. Call bind() first.
  bool run();
  // Unblocks run(). Safe to call from another thread.
  void stop();
  bool running() const;

 private:
  MemoryEngine& engine_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace recallm
