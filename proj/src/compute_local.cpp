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

#include <cstdlib>
#include <random>

#include "matloop/compute.hpp"

namespace matloop::compute {

std::vector<UnitOutcome> InProcessBackend::execute(const ExperimentSpec& spec, const ProgressFn& progress,
                                                   const std::set<std::string>& skip) {
  std::vector<const ExecutionUnit*> todo;
  for (const auto& u : spec.units)
    if (!skip.count(u.unit_id)) todo.push_back(&u);

  std::vector<std::optional<UnitOutcome>> slots(todo.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mu;
  std::exception_ptr fault;
  auto work = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      try {
        slots[k] = calc::run_unit(*todo[k]);
        if (progress) {
          std::lock_guard lock(progress_mu);
          if (!fault) progress(*slots[k]);
        }
      } catch (...) {
        std::lock_guard lock(progress_mu);
        if (!fault) fault = std::current_exception();
        next = todo.size();
      }
    }
  };
  const int n = std::min<int>(workers_, static_cast<int>(todo.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (fault) std::rethrow_exception(fault);

  std::vector<UnitOutcome> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  calc::sort_by_unit_id(out);
  return out;
}

std::string to_string(JobState s) {
  switch (s) {
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
  }
  return "";
}

JobState job_state_from_string(const std::string& s) {
  if (s == "queued") return JobState::kQueued;
  if (s == "running") return JobState::kRunning;
  if (s == "done") return JobState::kDone;
  if (s == "failed") return JobState::kFailed;
  throw Error("InvalidJobState", "unknown job state '" + s + "'");
}

Json to_json(const JobStatus& s) {
  return {{"state", to_string(s.state)}, {"completed_units", s.completed_units}, {"total_units", s.total_units}};
}

JobManager::JobManager(int workers, std::size_t queue_bound) : queue_bound_(queue_bound) {
  std::random_device rd;
  id_prefix_ = "job-" + hex16((static_cast<std::uint64_t>(rd()) << 32) ^ rd()).substr(8) + "-";
  if (workers < 1) workers = 1;
  for (int i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

JobManager::~JobManager() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : workers_) t.join();
}

std::string JobManager::submit(const Json& doc) {
  auto diags = validate_spec(doc);
  if (!diags.empty()) throw SchemaRejected(std::move(diags));
  auto job = std::make_shared<Job>();
  job->spec = spec_from_json(doc);
  job->slots.resize(job->spec.units.size());

  std::lock_guard lock(mu_);
  std::size_t active = 0;
  for (const auto& [id, j] : jobs_)
    if (j->state == JobState::kQueued || j->state == JobState::kRunning) ++active;
  if (active >= queue_bound_) throw Error("Overloaded", "job queue is full");
  job->id = id_prefix_ + std::to_string(++counter_);
  jobs_[job->id] = job;
  if (job->spec.units.empty()) {
    job->state = JobState::kDone;  // queued -> running -> done with nothing to run
  } else {
    pending_.push_back(job);
    cv_.notify_all();
  }
  return job->id;
}

JobStatus JobManager::status(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error("UnknownJob", "no job " + id);
  const Job& j = *it->second;
  return {j.state, j.completed, static_cast<int>(j.slots.size())};
}

std::vector<UnitOutcome> JobManager::results(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error("UnknownJob", "no job " + id);
  const Job& j = *it->second;
  if (j.state != JobState::kDone) throw Error("NotFinished", "job " + id + " is " + to_string(j.state));
  std::vector<UnitOutcome> out;
  for (const auto& s : j.slots) out.push_back(*s);
  calc::sort_by_unit_id(out);
  return out;
}

void JobManager::pause() {
  std::lock_guard lock(mu_);
  paused_ = true;
}

void JobManager::resume() {
  {
    std::lock_guard lock(mu_);
    paused_ = false;
  }
  cv_.notify_all();
}

void JobManager::worker_loop() {
  while (true) {
    std::shared_ptr<Job> job;
    std::size_t index = 0;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || (!paused_ && !pending_.empty()); });
      if (stopping_) return;
      job = pending_.front();
      index = static_cast<std::size_t>(job->started++);
      if (job->state == JobState::kQueued) job->state = JobState::kRunning;
      if (job->started == static_cast<int>(job->slots.size())) pending_.pop_front();
    }
    std::optional<UnitOutcome> outcome;
    bool fault = false;
    try {
      outcome = calc::run_unit(job->spec.units[index]);
    } catch (...) {
      fault = true;
    }
    std::lock_guard lock(mu_);
    if (fault) {
      job->state = JobState::kFailed;
      continue;
    }
    job->slots[index] = std::move(outcome);
    ++job->completed;
    if (job->completed == static_cast<int>(job->slots.size()) && job->state == JobState::kRunning)
      job->state = JobState::kDone;
  }
}

std::unique_ptr<ComputeBackend> backend_from_environment(int workers) {
  if (const char* url = std::getenv("MATLOOP_COMPUTE_URL"); url && *url)
    return std::make_unique<RemoteBackend>(url);
  return std::make_unique<InProcessBackend>(workers);
}

}  // namespace matloop::compute
