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

#ifndef MATLOOP_RUN_HPP_
#define MATLOOP_RUN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matloop/discussion.hpp"
#include "matloop/json_util.hpp"
#include "matloop/run_unit.hpp"
#include "matloop/spec_types.hpp"

namespace matloop::orchestrator {

enum class RunState { kCreated, kPreExperiment, kExperimenting, kDiscussing, kRevising, kReporting, kFinished, kAborted };
std::string to_string(RunState s);
RunState run_state_from_string(const std::string& s);
bool is_terminal(RunState s);
// created→pre_experiment→experimenting→discussing→(reporting→finished |
// revising→pre_experiment); aborted from any non-terminal state.
bool legal_transition(RunState from, RunState to);

enum class EventKind {
  kStateChanged,
  kUnitCompleted,
  kUnitFailed,
  kDebateTurn,
  kVerdict,
  kRevision,
  kReportReady,
  kError
};
std::string to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct RunEvent {
  std::int64_t seq = 0;
  std::string timestamp;  // ISO-8601 UTC, millisecond resolution
  EventKind kind = EventKind::kError;
  Json payload = Json::object();
};

Json to_json(const RunEvent& e);
RunEvent event_from_json(const Json& j);

struct IterationRecord {
  int iteration = 0;
  discussion::ExperimentPlan plan;
  std::optional<ExperimentSpec> spec;
  std::vector<calc::UnitOutcome> outcomes;  // executed units, arrival order
  std::vector<Json> turns;
  std::optional<discussion::Verdict> verdict;
  std::optional<discussion::RevisionPlan> revision;
};

struct Run {
  std::string run_id;
  Hypothesis hypothesis;
  Json config = Json::object();
  std::int64_t started_at_ms = 0;
  RunState state = RunState::kCreated;
  int iteration = 0;
  std::optional<CanonicalHypothesis> canonical;
  std::vector<IterationRecord> iterations;
  std::optional<Json> report;
  std::vector<Json> errors;
  std::optional<std::string> abort_code;
  std::int64_t last_seq = 0;

  std::vector<discussion::Verdict> verdicts() const;
};

Json to_json(const Run& r);
Run run_from_json(const Json& j);

// Folds one event into the run. Payloads by kind:
//   state_changed  {from, to} plus, entering created: {run_id, hypothesis,
//                  config, started_at_ms}; pre_experiment: {plan};
//                  experimenting: {canonical, spec}; aborted: {code, reason}
//   unit_completed {iteration, result}    unit_failed {iteration, failure}
//   debate_turn    {iteration, turn}      verdict {verdict}
//   revision       {iteration, revision}  report_ready {report}
//   error          {code, message}
// errors: IllegalTransition, EventOutOfOrder, MalformedEvent
void apply(Run& run, const RunEvent& event);

Run replay(const std::vector<RunEvent>& events);

std::string now_iso8601();
std::int64_t now_epoch_ms();

}  // namespace matloop::orchestrator

#endif  // MATLOOP_RUN_HPP_
