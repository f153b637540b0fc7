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

#ifndef MATLOOP_ORCHESTRATOR_HPP_
#define MATLOOP_ORCHESTRATOR_HPP_

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "matloop/agents.hpp"
#include "matloop/compute.hpp"
#include "matloop/discussion.hpp"
#include "matloop/llm_agent.hpp"
#include "matloop/registry.hpp"
#include "matloop/run.hpp"
#include "matloop/run_store.hpp"

namespace matloop::orchestrator {

// Config file shape:
//   {"compute": {"mode": "auto"|"in_process"|"remote", "url", "workers"},
//    "discussion": {"strategy", "rounds", "n_experts", "confidence_threshold", "max_iterations"},
//    "agents": {"mode": "scripted"|"llm", "llm": {...}},
//    "defaults": {<ResolvedSpec overrides>},
//    "trials": N,
//    "registry": <path to a registry JSON file>,
//    "retry": {"attempts", "base_delay_ms"}}
// Every key is optional. "auto" consults MATLOOP_COMPUTE_URL.
struct RunConfig {
  std::string compute_mode = "auto";
  std::string compute_url;
  int workers = compute::kDefaultWorkers;
  discussion::Strategy strategy = discussion::Strategy::kAdversarial;
  int rounds = 2;
  int n_experts = 5;
  discussion::SufficiencyConfig sufficiency;
  std::string agent_mode = "scripted";
  std::optional<discussion::LlmConfig> llm;
  SpecOverrides defaults;
  int n_trials = 3;
  std::string registry_path;
  int retry_attempts = 3;
  std::chrono::milliseconds retry_base_delay{1000};
};

// errors: InvalidConfig
RunConfig run_config_from_json(const Json& j);
Json to_json(const RunConfig& c);

// Test and embedding seams. Anything left empty is built from the config.
struct RunHooks {
  std::shared_ptr<compute::ComputeBackend> backend;
  std::optional<discussion::AgentSet> agents;
  std::shared_ptr<const frontend::MaterialRegistry> registry;
  // Polled between events; a set flag aborts the run with AbortedByUser.
  const std::atomic<bool>* abort = nullptr;
  // Called after each event is persisted.
  std::function<void(const Run&, const RunEvent&)> on_event;
};

// Drives a new run to finished or aborted, persisting every event. Aborted
// runs (user abort, exhausted retries, unusable hypothesis) still carry an
// inconclusive report. The returned run is the final snapshot.
Run execute_run(const Hypothesis& hypothesis, const RunConfig& config, RunStore& store, const RunHooks& hooks = {},
                const std::string& run_id = "");

// Creates the run directory and persists the creation event only; drive it
// with resume_run. errors: RunExists
Run create_run(const Hypothesis& hypothesis, const RunConfig& config, RunStore& store, const RunHooks& hooks = {},
               const std::string& run_id = "");

// Rebuilds the run from its event log and continues from the recorded
// state; units already recorded are not executed again.
// errors: UnknownRun
Run resume_run(const std::string& run_id, RunStore& store, const RunHooks& hooks = {});

// Codes that mean the hypothesis itself was unusable (CLI exit code 1).
bool is_validation_abort(const std::string& code);

}  // namespace matloop::orchestrator

#endif  // MATLOOP_ORCHESTRATOR_HPP_
