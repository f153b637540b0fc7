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

#include "matloop/run.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <utility>

#include "matloop/error.hpp"

namespace matloop::orchestrator {

namespace {

constexpr std::array<std::pair<RunState, const char*>, 8> kStates{{
    {RunState::kCreated, "created"},
    {RunState::kPreExperiment, "pre_experiment"},
    {RunState::kExperimenting, "experimenting"},
    {RunState::kDiscussing, "discussing"},
    {RunState::kRevising, "revising"},
    {RunState::kReporting, "reporting"},
    {RunState::kFinished, "finished"},
    {RunState::kAborted, "aborted"},
}};

constexpr std::array<std::pair<EventKind, const char*>, 8> kKinds{{
    {EventKind::kStateChanged, "state_changed"},
    {EventKind::kUnitCompleted, "unit_completed"},
    {EventKind::kUnitFailed, "unit_failed"},
    {EventKind::kDebateTurn, "debate_turn"},
    {EventKind::kVerdict, "verdict"},
    {EventKind::kRevision, "revision"},
    {EventKind::kReportReady, "report_ready"},
    {EventKind::kError, "error"},
}};

Json plan_to_json(const discussion::ExperimentPlan& p) { return {{"n_trials", p.n_trials}, {"fmax", p.fmax}}; }

discussion::ExperimentPlan plan_from_json(const Json& j) {
  return {j.at("n_trials").get<int>(), j.at("fmax").get<double>()};
}

[[noreturn]] void malformed(const RunEvent& e, const std::string& why) {
  throw Error("MalformedEvent", "event " + std::to_string(e.seq) + " (" + to_string(e.kind) + "): " + why);
}

IterationRecord& current(Run& run, const RunEvent& e) {
  if (run.iterations.empty()) malformed(e, "no iteration in progress");
  return run.iterations.back();
}

void require_state(const Run& run, const RunEvent& e, RunState s) {
  if (run.state != s)
    throw Error("IllegalTransition", to_string(e.kind) + " event in state " + to_string(run.state));
}

void require_iteration(const Run& run, const RunEvent& e) {
  if (e.payload.value("iteration", -1) != run.iteration) malformed(e, "iteration does not match the run");
}

void apply_state_change(Run& run, const RunEvent& e) {
  const auto to = run_state_from_string(e.payload.at("to").get<std::string>());
  if (run.last_seq == 0) {
    if (to != RunState::kCreated) throw Error("IllegalTransition", "a run must start in created");
    run.run_id = e.payload.at("run_id").get<std::string>();
    run.hypothesis = hypothesis_from_json(e.payload.at("hypothesis"));
    run.config = e.payload.at("config");
    run.started_at_ms = e.payload.at("started_at_ms").get<std::int64_t>();
    run.state = RunState::kCreated;
    return;
  }
  const auto from = run_state_from_string(e.payload.at("from").get<std::string>());
  if (from != run.state || !legal_transition(from, to))
    throw Error("IllegalTransition", "cannot go from " + to_string(run.state) + " to " + to_string(to) +
                                         " (event claims " + to_string(from) + ")");
  switch (to) {
    case RunState::kPreExperiment: {
      IterationRecord it;
      it.iteration = run.iteration;
      it.plan = plan_from_json(e.payload.at("plan"));
      run.iterations.push_back(std::move(it));
      break;
    }
    case RunState::kExperimenting:
      run.canonical = canonical_from_json(e.payload.at("canonical"));
      current(run, e).spec = spec_from_json(e.payload.at("spec"));
      break;
    case RunState::kRevising:
      ++run.iteration;
      break;
    case RunState::kAborted:
      run.abort_code = e.payload.value("code", "Aborted");
      break;
    default:
      break;
  }
  run.state = to;
}

}  // namespace

std::string to_string(RunState s) {
  for (const auto& [k, v] : kStates)
    if (k == s) return v;
  return "";
}

RunState run_state_from_string(const std::string& s) {
  for (const auto& [k, v] : kStates)
    if (s == v) return k;
  throw Error("MalformedEvent", "unknown run state '" + s + "'");
}

bool is_terminal(RunState s) { return s == RunState::kFinished || s == RunState::kAborted; }

bool legal_transition(RunState from, RunState to) {
  using S = RunState;
  if (to == S::kAborted) return !is_terminal(from);
  switch (from) {
    case S::kCreated: return to == S::kPreExperiment;
    case S::kPreExperiment: return to == S::kExperimenting;
    case S::kExperimenting: return to == S::kDiscussing;
    case S::kDiscussing: return to == S::kReporting || to == S::kRevising;
    case S::kRevising: return to == S::kPreExperiment;
    case S::kReporting: return to == S::kFinished;
    default: return false;
  }
}

std::string to_string(EventKind k) {
  for (const auto& [e, v] : kKinds)
    if (e == k) return v;
  return "";
}

EventKind event_kind_from_string(const std::string& s) {
  for (const auto& [e, v] : kKinds)
    if (s == v) return e;
  throw Error("MalformedEvent", "unknown event kind '" + s + "'");
}

Json to_json(const RunEvent& e) {
  return {{"seq", e.seq}, {"timestamp", e.timestamp}, {"kind", to_string(e.kind)}, {"payload", e.payload}};
}

RunEvent event_from_json(const Json& j) {
  return {j.at("seq").get<std::int64_t>(), j.at("timestamp").get<std::string>(),
          event_kind_from_string(j.at("kind").get<std::string>()), j.at("payload")};
}

std::vector<discussion::Verdict> Run::verdicts() const {
  std::vector<discussion::Verdict> out;
  for (const auto& it : iterations)
    if (it.verdict) out.push_back(*it.verdict);
  return out;
}

Json to_json(const Run& r) {
  Json iterations = Json::array();
  for (const auto& it : r.iterations) {
    Json turns = Json::array();
    for (const auto& t : it.turns) turns.push_back(t);
    iterations.push_back({{"iteration", it.iteration},
                          {"plan", plan_to_json(it.plan)},
                          {"spec", it.spec ? to_json(*it.spec) : Json()},
                          {"outcomes", calc::to_json(it.outcomes)},
                          {"turns", turns},
                          {"verdict", it.verdict ? to_json(*it.verdict) : Json()},
                          {"revision", it.revision ? to_json(*it.revision) : Json()}});
  }
  Json errors = Json::array();
  for (const auto& e : r.errors) errors.push_back(e);
  return {{"run_id", r.run_id},
          {"hypothesis", to_json(r.hypothesis)},
          {"config", r.config},
          {"started_at_ms", r.started_at_ms},
          {"state", to_string(r.state)},
          {"iteration", r.iteration},
          {"canonical", r.canonical ? to_json(*r.canonical) : Json()},
          {"iterations", iterations},
          {"report", r.report ? *r.report : Json()},
          {"errors", errors},
          {"abort_code", r.abort_code ? Json(*r.abort_code) : Json()},
          {"last_seq", r.last_seq}};
}

Run run_from_json(const Json& j) {
  Run r;
  r.run_id = j.at("run_id").get<std::string>();
  r.hypothesis = hypothesis_from_json(j.at("hypothesis"));
  r.config = j.at("config");
  r.started_at_ms = j.at("started_at_ms").get<std::int64_t>();
  r.state = run_state_from_string(j.at("state").get<std::string>());
  r.iteration = j.at("iteration").get<int>();
  if (!j.at("canonical").is_null()) r.canonical = canonical_from_json(j.at("canonical"));
  for (const auto& ij : j.at("iterations")) {
    IterationRecord it;
    it.iteration = ij.at("iteration").get<int>();
    it.plan = plan_from_json(ij.at("plan"));
    if (!ij.at("spec").is_null()) it.spec = spec_from_json(ij.at("spec"));
    it.outcomes = calc::outcomes_from_json(ij.at("outcomes"));
    for (const auto& t : ij.at("turns")) it.turns.push_back(t);
    if (!ij.at("verdict").is_null()) it.verdict = discussion::verdict_from_json(ij.at("verdict"));
    if (!ij.at("revision").is_null()) it.revision = discussion::revision_from_json(ij.at("revision"));
    r.iterations.push_back(std::move(it));
  }
  if (!j.at("report").is_null()) r.report = j.at("report");
  for (const auto& e : j.at("errors")) r.errors.push_back(e);
  if (!j.at("abort_code").is_null()) r.abort_code = j.at("abort_code").get<std::string>();
  r.last_seq = j.at("last_seq").get<std::int64_t>();
  return r;
}

void apply(Run& run, const RunEvent& e) {
  if (e.seq != run.last_seq + 1)
    throw Error("EventOutOfOrder",
                "expected seq " + std::to_string(run.last_seq + 1) + ", got " + std::to_string(e.seq));
  if (run.last_seq == 0 && e.kind != EventKind::kStateChanged)
    throw Error("IllegalTransition", "the first event must create the run");
  try {
    switch (e.kind) {
      case EventKind::kStateChanged:
        apply_state_change(run, e);
        break;
      case EventKind::kUnitCompleted:
      case EventKind::kUnitFailed: {
        require_state(run, e, RunState::kExperimenting);
        require_iteration(run, e);
        auto outcome = e.kind == EventKind::kUnitCompleted
                           ? calc::UnitOutcome(calc::result_from_json(e.payload.at("result")))
                           : calc::UnitOutcome(failure_from_json(e.payload.at("failure")));
        auto& it = current(run, e);
        for (const auto& o : it.outcomes)
          if (calc::unit_id_of(o) == calc::unit_id_of(outcome)) malformed(e, "unit recorded twice");
        it.outcomes.push_back(std::move(outcome));
        break;
      }
      case EventKind::kDebateTurn:
        require_state(run, e, RunState::kDiscussing);
        require_iteration(run, e);
        current(run, e).turns.push_back(e.payload.at("turn"));
        break;
      case EventKind::kVerdict: {
        require_state(run, e, RunState::kDiscussing);
        auto v = discussion::verdict_from_json(e.payload.at("verdict"));
        if (v.iteration != run.iteration) malformed(e, "verdict for another iteration");
        auto& it = current(run, e);
        if (it.verdict) malformed(e, "iteration already has a verdict");
        it.verdict = std::move(v);
        break;
      }
      case EventKind::kRevision: {
        require_state(run, e, RunState::kRevising);
        require_iteration(run, e);
        current(run, e).revision = discussion::revision_from_json(e.payload.at("revision"));
        break;
      }
      case EventKind::kReportReady:
        if (run.state != RunState::kReporting && run.state != RunState::kAborted)
          throw Error("IllegalTransition", "report_ready in state " + to_string(run.state));
        run.report = e.payload.at("report");
        break;
      case EventKind::kError:
        run.errors.push_back(e.payload);
        break;
    }
  } catch (const Json::exception& ex) {
    malformed(e, ex.what());
  }
  run.last_seq = e.seq;
}

Run replay(const std::vector<RunEvent>& events) {
  Run run;
  for (const auto& e : events) apply(run, e);
  return run;
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::int64_t now_epoch_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace matloop::orchestrator
