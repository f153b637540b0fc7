// Copyright 2026 The matloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MATLOOP_API_SERVER_HPP_
#define MATLOOP_API_SERVER_HPP_

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "matloop/orchestrator.hpp"

namespace matloop::orchestrator {

// HTTP API consumed by the dashboard:
//   POST /api/runs {hypothesis_text, config?}  -> 201 {run_id} | 400 {error}
//   GET  /api/runs                             -> 200 {runs: [summary...]}
//   GET  /api/runs/{id}                        -> 200 snapshot | 404
//   GET  /api/runs/{id}/events                 -> text/event-stream, replay from seq 1 then live
//   POST /api/runs/{id}/abort                  -> 202 | 404 | 409
// Request configs are merged over the server defaults. Each run executes on
// its own thread.
class ApiServer {
 public:
  ApiServer(RunStore& store, RunConfig defaults, RunHooks hooks = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Serves files from `dir` at "/" alongside the API.
  void set_static_dir(const std::string& dir);

  // Port 0 picks a free port; returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void listen_blocking(const std::string& host, int port);
  // Stops serving, aborts active runs and joins them.
  void stop();
  // Blocks until every run started so far has reached a terminal state.
  void wait_idle();

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  struct ActiveRun {
    std::atomic<bool> abort{false};
    std::atomic<bool> done{false};
    RunHooks hooks;
    std::thread thread;
  };
  struct Impl;

  void routes();
  std::string launch(const Json& body);

  RunStore& store_;
  RunConfig defaults_;
  RunHooks hooks_;
  std::unique_ptr<Impl> impl_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<ActiveRun>> active_;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
  int port_ = 0;
};

// "event: <kind>\nid: <seq>\ndata: <payload>\n\n"
std::string sse_frame(const RunEvent& e);

}  // namespace matloop::orchestrator

#endif  // MATLOOP_API_SERVER_HPP_
