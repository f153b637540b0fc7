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

#ifndef MATLOOP_COMPUTE_HPP_
#define MATLOOP_COMPUTE_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "matloop/error.hpp"
#include "matloop/run_unit.hpp"
#include "matloop/schema.hpp"
#include "matloop/spec_types.hpp"

namespace matloop::compute {

using calc::UnitOutcome;

// Invoked once per finished unit, possibly from worker threads (calls are
// serialized by the backend). An exception thrown by the callback stops
// further units and is rethrown from execute().
using ProgressFn = std::function<void(const UnitOutcome&)>;

// Executes the units of a spec (not its pre-experiment failures) and
// returns one outcome per executed unit, sorted by unit_id.
class ComputeBackend {
 public:
  virtual ~ComputeBackend() = default;
  // `skip` names units whose outcome the caller already holds; they are
  // neither reported nor returned.
  virtual std::vector<UnitOutcome> execute(const ExperimentSpec& spec, const ProgressFn& progress = {},
                                           const std::set<std::string>& skip = {}) = 0;
  virtual std::string name() const = 0;
};

inline constexpr int kDefaultWorkers = 4;
inline constexpr std::size_t kDefaultQueueBound = 64;

class InProcessBackend : public ComputeBackend {
 public:
  explicit InProcessBackend(int workers = kDefaultWorkers) : workers_(workers < 1 ? 1 : workers) {}
  std::vector<UnitOutcome> execute(const ExperimentSpec& spec, const ProgressFn& progress = {},
                                   const std::set<std::string>& skip = {}) override;
  std::string name() const override { return "in_process"; }

 private:
  int workers_;
};

enum class JobState { kQueued, kRunning, kDone, kFailed };
std::string to_string(JobState s);
JobState job_state_from_string(const std::string& s);

struct JobStatus {
  JobState state = JobState::kQueued;
  int completed_units = 0;
  int total_units = 0;
};

Json to_json(const JobStatus& s);

class SchemaRejected : public Error {
 public:
  explicit SchemaRejected(std::vector<Diagnostic> diags)
      : Error("SchemaRejected", diags.empty() ? "spec rejected" : diags.front().path + ": " + diags.front().message),
        diagnostics_(std::move(diags)) {}
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// FIFO job queue with a fixed worker pool. Units of one job run
// concurrently up to the worker count; jobs are admitted while fewer than
// `queue_bound` jobs are queued or running. Finished jobs stay in memory
// until the manager is destroyed.
class JobManager {
 public:
  explicit JobManager(int workers = kDefaultWorkers, std::size_t queue_bound = kDefaultQueueBound);
  ~JobManager();
  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  // errors: SchemaRejected, Overloaded
  std::string submit(const Json& spec_document);
  // errors: UnknownJob
  JobStatus status(const std::string& job_id) const;
  // errors: UnknownJob, NotFinished
  std::vector<UnitOutcome> results(const std::string& job_id) const;

  // Blocks admission of new work to workers until resume(); for tests that
  // need to observe the queued state.
  void pause();
  void resume();

 private:
  struct Job {
    std::string id;
    ExperimentSpec spec;
    JobState state = JobState::kQueued;
    int completed = 0;
    int started = 0;
    std::vector<std::optional<UnitOutcome>> slots;
  };

  void worker_loop();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> pending_;  // jobs with units not yet started
  std::size_t queue_bound_;
  std::uint64_t counter_ = 0;
  std::string id_prefix_;
  bool stopping_ = false;
  bool paused_ = false;
  std::vector<std::thread> workers_;
};

// HTTP front end for a JobManager:
//   POST /v1/jobs                 -> 201 {"job_id"} | 400 schema_rejected | 503 overloaded
//   GET  /v1/jobs/{id}            -> 200 {"state","completed_units","total_units"} | 404
//   GET  /v1/jobs/{id}/results    -> 200 {"results":[...]} | 404 | 409 not_finished
class JobServer {
 public:
  explicit JobServer(int workers = kDefaultWorkers, std::size_t queue_bound = kDefaultQueueBound);
  ~JobServer();

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void listen_blocking(const std::string& host, int port);
  void stop();

  JobManager& manager() { return manager_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  struct Impl;
  JobManager manager_;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

struct RemoteOptions {
  std::chrono::milliseconds poll_interval{25};
  std::chrono::seconds timeout{600};
};

// Client side of the job protocol. Connection failures raise
// Error("BackendUnreachable"); retry policy belongs to the caller.
class RemoteBackend : public ComputeBackend {
 public:
  explicit RemoteBackend(std::string base_url, RemoteOptions options = {});
  std::vector<UnitOutcome> execute(const ExperimentSpec& spec, const ProgressFn& progress = {},
                                   const std::set<std::string>& skip = {}) override;
  std::string name() const override { return "remote"; }

  // Individual protocol calls, exposed for protocol-level tests.
  std::string submit(const Json& spec_document);
  JobStatus status(const std::string& job_id);
  std::vector<UnitOutcome> results(const std::string& job_id);

 private:
  std::string base_url_;
  RemoteOptions options_;
};

// MATLOOP_COMPUTE_URL selects a RemoteBackend; otherwise in-process.
std::unique_ptr<ComputeBackend> backend_from_environment(int workers = kDefaultWorkers);

}  // namespace matloop::compute

#endif  // MATLOOP_COMPUTE_HPP_
