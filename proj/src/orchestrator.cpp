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

#include "matloop/orchestrator.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "matloop/error.hpp"
#include "matloop/frontend.hpp"
#include "matloop/report.hpp"

namespace matloop::orchestrator {

namespace {

using discussion::ExperimentPlan;
using frontend::MaterialRegistry;

struct UserAbort {};

Json plan_json(const ExperimentPlan& p) { return {{"n_trials", p.n_trials}, {"fmax", p.fmax}}; }

class Driver {
 public:
  Driver(Run run, RunConfig config, RunStore& store, const RunHooks& hooks)
      : run_(std::move(run)), config_(std::move(config)), store_(store), hooks_(hooks) {}

  // Emits the creation event for a fresh run.
  void create(const Hypothesis& h, const Json& config_doc) {
    emit(EventKind::kStateChanged, {{"to", "created"},
                                    {"run_id", run_.run_id},
                                    {"hypothesis", to_json(h)},
                                    {"config", config_doc},
                                    {"started_at_ms", now_epoch_ms()}});
  }

  const Run& run() const { return run_; }

  Run drive() {
    try {
      while (!is_terminal(run_.state)) step();
    } catch (const UserAbort&) {
      abort("AbortedByUser", "run aborted by user");
    } catch (const Error& e) {
      abort(e.code(), e.what());
    } catch (const std::exception& e) {
      abort("InternalError", e.what());
    }
    return run_;
  }

 private:
  void check_abort() const {
    if (hooks_.abort && hooks_.abort->load()) throw UserAbort{};
  }

  void emit(EventKind kind, Json payload) {
    RunEvent e{run_.last_seq + 1, now_iso8601(), kind, std::move(payload)};
    Run next = run_;
    apply(next, e);
    store_.append(next, e);
    run_ = std::move(next);
    if (hooks_.on_event) hooks_.on_event(run_, e);
  }

  void transition(RunState to, Json extra = Json::object()) {
    extra["from"] = to_string(run_.state);
    extra["to"] = to_string(to);
    emit(EventKind::kStateChanged, std::move(extra));
  }

  void abort(const std::string& code, const std::string& message) {
    if (is_terminal(run_.state)) return;
    emit(EventKind::kError, {{"code", code}, {"message", message}});
    transition(RunState::kAborted, {{"code", code}, {"reason", message}});
    emit(EventKind::kReportReady, {{"report", generate_report(run_, now_epoch_ms())}});
  }

  IterationRecord& current() { return run_.iterations.back(); }

  void step() {
    check_abort();
    switch (run_.state) {
      case RunState::kCreated:
        transition(RunState::kPreExperiment, {{"plan", plan_json(initial_plan())}});
        break;
      case RunState::kPreExperiment:
        pre_experiment();
        break;
      case RunState::kExperimenting:
        experiment();
        break;
      case RunState::kDiscussing:
        discuss();
        break;
      case RunState::kRevising: {
        if (!current().revision) {
          // Crash between entering revising and recording the plan: the
          // decision is a pure function of the previous verdict.
          const auto& prev = run_.iterations.back();
          auto action = discussion::decide_next(*prev.verdict, config_.sufficiency, prev.plan);
          emit(EventKind::kRevision, {{"iteration", run_.iteration}, {"revision", to_json(action.revision)}});
        }
        transition(RunState::kPreExperiment, {{"plan", plan_json(current().revision->next)}});
        break;
      }
      case RunState::kReporting:
        if (!run_.report) emit(EventKind::kReportReady, {{"report", generate_report(run_, now_epoch_ms())}});
        transition(RunState::kFinished);
        break;
      default:
        break;
    }
  }

  ExperimentPlan initial_plan() const {
    ExperimentPlan p;
    p.n_trials = config_.n_trials;
    if (config_.defaults.fmax) p.fmax = *config_.defaults.fmax;
    return p;
  }

  const MaterialRegistry& registry() {
    if (hooks_.registry) return *hooks_.registry;
    if (!config_.registry_path.empty()) {
      if (!own_registry_) own_registry_ = MaterialRegistry::from_file(config_.registry_path);
      return *own_registry_;
    }
    return MaterialRegistry::builtin();
  }

  discussion::AgentSet& agents() {
    if (!agents_) {
      if (hooks_.agents) agents_ = *hooks_.agents;
      else if (config_.agent_mode == "llm") agents_ = discussion::llm_agents(*config_.llm, config_.n_experts);
      else agents_ = discussion::scripted_agents(config_.n_experts);
    }
    return *agents_;
  }

  compute::ComputeBackend& backend() {
    if (hooks_.backend) return *hooks_.backend;
    if (!backend_) {
      if (config_.compute_mode == "remote") backend_ = std::make_unique<compute::RemoteBackend>(config_.compute_url);
      else if (config_.compute_mode == "in_process") backend_ = std::make_unique<compute::InProcessBackend>(config_.workers);
      else backend_ = compute::backend_from_environment(config_.workers);
    }
    return *backend_;
  }

  void pre_experiment() {
    const auto mode =
        config_.agent_mode == "llm" ? frontend::CanonicalizeMode::kAgent : frontend::CanonicalizeMode::kGrammar;
    const CanonicalHypothesis canonical = frontend::canonicalize(run_.hypothesis, mode, agents().canonicalizer.get());
    SpecOverrides overrides = config_.defaults;
    overrides.fmax = current().plan.fmax;
    const auto materials = frontend::resolve_materials(canonical, registry());
    const auto resolved = frontend::resolve_spec(canonical, overrides);
    const ExperimentSpec spec = frontend::assemble_units(canonical, materials, resolved, current().plan.n_trials);
    transition(RunState::kExperimenting, {{"canonical", to_json(canonical)}, {"spec", to_json(spec)}});
  }

  void record(const calc::UnitOutcome& o) {
    if (const auto* r = std::get_if<calc::SimulationResult>(&o))
      emit(EventKind::kUnitCompleted, {{"iteration", run_.iteration}, {"result", to_json(*r)}});
    else
      emit(EventKind::kUnitFailed, {{"iteration", run_.iteration}, {"failure", to_json(std::get<UnitFailure>(o))}});
  }

  void experiment() {
    const ExperimentSpec spec = *current().spec;
    for (int attempt = 1;; ++attempt) {
      std::set<std::string> skip;
      for (const auto& o : current().outcomes) skip.insert(calc::unit_id_of(o));
      if (skip.size() < spec.units.size()) {
        try {
          backend().execute(spec, [this](const calc::UnitOutcome& o) {
            check_abort();
            record(o);
          }, skip);
        } catch (const Error& e) {
          if (e.code() != "BackendUnreachable") throw;
          emit(EventKind::kError, {{"code", e.code()}, {"message", e.what()}, {"attempt", attempt}});
          if (attempt >= config_.retry_attempts) throw;
          std::this_thread::sleep_for(config_.retry_base_delay * (1 << (attempt - 1)));
          check_abort();
          continue;
        }
      }
      break;
    }
    transition(RunState::kDiscussing);
  }

  void discuss() {
    IterationRecord& it = current();
    if (!it.verdict) {
      std::vector<calc::UnitOutcome> outcomes(it.spec->failures.begin(), it.spec->failures.end());
      outcomes.insert(outcomes.end(), it.outcomes.begin(), it.outcomes.end());
      calc::sort_by_unit_id(outcomes);
      std::optional<discussion::EvidenceSummary> evidence;
      try {
        evidence = discussion::summarize_evidence(outcomes, run_.canonical->claim);
      } catch (const Error& e) {
        if (e.code() != "NoEvidence") throw;
      }
      // Turns recorded before a crash are replayed silently.
      const std::size_t already = it.turns.size();
      std::size_t produced = 0;
      auto observer = [&](const Json& turn) {
        if (produced++ < already) return;
        check_abort();
        emit(EventKind::kDebateTurn, {{"iteration", run_.iteration}, {"turn", turn}});
      };
      const auto* ev = evidence ? &*evidence : nullptr;
      discussion::Verdict v =
          config_.strategy == discussion::Strategy::kAdversarial
              ? discussion::make_verdict(discussion::adversarial_debate(ev, agents(), config_.rounds, observer),
                                         run_.iteration)
              : discussion::make_verdict(discussion::expert_vote(ev, agents(), config_.n_experts, observer),
                                         run_.iteration);
      emit(EventKind::kVerdict, {{"verdict", to_json(v)}});
    }
    const IterationRecord& done = current();
    const auto action = discussion::decide_next(*done.verdict, config_.sufficiency, done.plan);
    if (action.finalize) {
      transition(RunState::kReporting);
      return;
    }
    transition(RunState::kRevising);
    emit(EventKind::kRevision, {{"iteration", run_.iteration}, {"revision", to_json(action.revision)}});
  }

  Run run_;
  RunConfig config_;
  RunStore& store_;
  const RunHooks& hooks_;
  std::optional<MaterialRegistry> own_registry_;
  std::optional<discussion::AgentSet> agents_;
  std::unique_ptr<compute::ComputeBackend> backend_;
};

Json llm_to_json(const discussion::LlmConfig& c) {
  return {{"endpoint", c.endpoint},
          {"model", c.model},
          {"api_key_env", c.api_key_env},
          {"temperature", c.temperature},
          {"timeout_s", c.timeout.count()}};
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error("InvalidConfig", "config must be a JSON object");
  RunConfig c;
  try {
    const Json compute = j.value("compute", Json::object());
    c.compute_mode = get_or<std::string>(compute, "mode", c.compute_mode);
    c.compute_url = get_or<std::string>(compute, "url", c.compute_url);
    c.workers = get_or<int>(compute, "workers", c.workers);
    if (c.compute_mode != "auto" && c.compute_mode != "in_process" && c.compute_mode != "remote")
      throw Error("InvalidConfig", "compute.mode must be auto, in_process or remote");
    if (c.compute_mode == "remote" && c.compute_url.empty())
      throw Error("InvalidConfig", "compute.mode remote needs compute.url");

    const Json disc = j.value("discussion", Json::object());
    if (disc.contains("strategy")) c.strategy = discussion::strategy_from_string(disc.at("strategy").get<std::string>());
    c.rounds = get_or<int>(disc, "rounds", c.rounds);
    c.n_experts = get_or<int>(disc, "n_experts", c.n_experts);
    c.sufficiency.confidence_threshold =
        get_or<double>(disc, "confidence_threshold", c.sufficiency.confidence_threshold);
    c.sufficiency.max_iterations = get_or<int>(disc, "max_iterations", c.sufficiency.max_iterations);
    if (c.rounds < 1) throw Error("InvalidConfig", "discussion.rounds must be >= 1");
    if (c.n_experts < 3 || c.n_experts % 2 == 0) throw Error("InvalidConfig", "discussion.n_experts must be odd and >= 3");
    if (c.sufficiency.max_iterations < 1) throw Error("InvalidConfig", "discussion.max_iterations must be >= 1");

    const Json agents = j.value("agents", Json::object());
    c.agent_mode = get_or<std::string>(agents, "mode", c.agent_mode);
    if (c.agent_mode != "scripted" && c.agent_mode != "llm")
      throw Error("InvalidConfig", "agents.mode must be scripted or llm");
    if (agents.contains("llm")) c.llm = discussion::llm_config_from_json(agents.at("llm"));
    if (c.agent_mode == "llm" && !c.llm) throw Error("InvalidConfig", "agents.mode llm needs agents.llm");

    if (j.contains("defaults")) c.defaults = overrides_from_json(j.at("defaults"));
    c.n_trials = get_or<int>(j, "trials", c.n_trials);
    if (c.n_trials < 1) throw Error("InvalidConfig", "trials must be >= 1");
    c.registry_path = get_or<std::string>(j, "registry", c.registry_path);

    const Json retry = j.value("retry", Json::object());
    c.retry_attempts = get_or<int>(retry, "attempts", c.retry_attempts);
    c.retry_base_delay = std::chrono::milliseconds(get_or<int>(retry, "base_delay_ms", 1000));
    if (c.retry_attempts < 1) throw Error("InvalidConfig", "retry.attempts must be >= 1");
  } catch (const Json::exception& e) {
    throw Error("InvalidConfig", e.what());
  } catch (const Error& e) {
    if (e.code() == "InvalidConfig") throw;
    throw Error("InvalidConfig", e.what());
  }
  return c;
}

Json to_json(const RunConfig& c) {
  Json agents = {{"mode", c.agent_mode}};
  if (c.llm) agents["llm"] = llm_to_json(*c.llm);
  Json compute = {{"mode", c.compute_mode}, {"workers", c.workers}};
  if (!c.compute_url.empty()) compute["url"] = c.compute_url;
  Json j = {{"compute", compute},
            {"discussion",
             {{"strategy", to_string(c.strategy)},
              {"rounds", c.rounds},
              {"n_experts", c.n_experts},
              {"confidence_threshold", c.sufficiency.confidence_threshold},
              {"max_iterations", c.sufficiency.max_iterations}}},
            {"agents", agents},
            {"defaults", to_json(c.defaults)},
            {"trials", c.n_trials},
            {"retry", {{"attempts", c.retry_attempts}, {"base_delay_ms", c.retry_base_delay.count()}}}};
  if (!c.registry_path.empty()) j["registry"] = c.registry_path;
  return j;
}

Run create_run(const Hypothesis& hypothesis, const RunConfig& config, RunStore& store, const RunHooks& hooks,
               const std::string& run_id) {
  Run run;
  run.run_id = run_id.empty() ? new_run_id() : run_id;
  store.create(run.run_id);
  Hypothesis h = hypothesis;
  if (h.id.empty()) h.id = "h-" + run.run_id.substr(run.run_id.find('-') + 1);
  if (h.submitted_at.empty()) h.submitted_at = now_iso8601();
  Driver d(std::move(run), config, store, hooks);
  d.create(h, to_json(config));
  return d.run();
}

Run execute_run(const Hypothesis& hypothesis, const RunConfig& config, RunStore& store, const RunHooks& hooks,
                const std::string& run_id) {
  const Run created = create_run(hypothesis, config, store, hooks, run_id);
  Driver d(created, config, store, hooks);
  return d.drive();
}

Run resume_run(const std::string& run_id, RunStore& store, const RunHooks& hooks) {
  Run run = store.rebuild(run_id);
  if (run.last_seq == 0) throw Error("UnknownRun", "run " + run_id + " has no events");
  RunConfig config = run_config_from_json(run.config);
  Driver d(std::move(run), std::move(config), store, hooks);
  return d.drive();
}

bool is_validation_abort(const std::string& code) {
  return code == "EmptyHypothesis" || code == "GrammarMismatch" || code == "AgentOutputInvalid" ||
         code == "InvalidTrialCount" || code == "InvalidConfig";
}

}  // namespace matloop::orchestrator
