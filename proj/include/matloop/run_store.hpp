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

#ifndef MATLOOP_RUN_STORE_HPP_
#define MATLOOP_RUN_STORE_HPP_

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "matloop/run.hpp"

namespace matloop::orchestrator {

// One directory per run under `root`:
//   <run_id>/events.jsonl  append-only, one canonical event per line
//   <run_id>/run.json      snapshot after the latest event (temp + rename)
// The event log is authoritative; the snapshot may trail it by one event
// after a crash.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path dir(const std::string& run_id) const { return root_ / run_id; }
  bool exists(const std::string& run_id) const;
  std::vector<std::string> list() const;

  // errors: RunExists
  void create(const std::string& run_id);
  // Appends the event line, then rewrites the snapshot.
  void append(const Run& after, const RunEvent& event);

  // Complete lines only, so a concurrent reader sees a prefix of the log.
  // errors: UnknownRun
  std::vector<RunEvent> events(const std::string& run_id, std::int64_t after_seq = 0) const;
  // errors: UnknownRun
  Run snapshot(const std::string& run_id) const;
  // Event-log replay; errors: UnknownRun
  Run rebuild(const std::string& run_id) const;

  // Blocks until some event with seq > after_seq exists or the timeout
  // passes; returns the new events (possibly none).
  std::vector<RunEvent> wait_events(const std::string& run_id, std::int64_t after_seq,
                                    std::chrono::milliseconds timeout) const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
};

// Run ids: "run-" + 16 hex digits.
std::string new_run_id();

}  // namespace matloop::orchestrator

#endif  // MATLOOP_RUN_STORE_HPP_
