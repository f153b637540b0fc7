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

#include "matloop/report.hpp"

#include <sstream>

#include "matloop/error.hpp"
#include "matloop/grammar.hpp"

namespace matloop::orchestrator {

namespace {

using discussion::ReportDecision;
using frontend::format_number;

Json result_row(const calc::UnitOutcome& o, const std::string& property) {
  if (const auto* r = std::get_if<calc::SimulationResult>(&o)) {
    Json row = {{"unit_id", r->unit_id},
                {"material", r->material},
                {"trial_index", r->trial_index},
                {"status", "ok"},
                {"converged", r->relaxation.converged},
                {"steps_taken", r->relaxation.steps_taken},
                {"max_force", r->relaxation.max_force},
                {"final_energy", r->relaxation.final_energy},
                {"properties", calc::to_json(r->properties)},
                {"wall_time_ms", r->wall_time_ms}};
    auto it = r->properties.find(property);
    row["value"] = it == r->properties.end() ? Json() : Json(it->second.value);
    return row;
  }
  const auto& f = std::get<UnitFailure>(o);
  return {{"unit_id", f.unit_id},
          {"material", f.material},
          {"status", "failed"},
          {"stage", to_string(f.stage)},
          {"message", f.message},
          {"recoverable", f.recoverable},
          {"value", nullptr}};
}

Json spec_summary(const ExperimentSpec& s) {
  Json materials = Json::array();
  for (const auto& u : s.units)
    if (materials.empty() || materials.back() != u.material.key) materials.push_back(u.material.key);
  Json summary = {{"spec_id", s.spec_id},
                  {"canonical_ref", s.canonical_ref},
                  {"n_units", s.units.size()},
                  {"n_preexperiment_failures", s.failures.size()},
                  {"materials", materials}};
  if (!s.units.empty()) summary["resolved"] = to_json(s.units.front().resolved);
  return summary;
}

std::string cell(const Json& v) {
  if (v.is_null()) return "-";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string escape_cell(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

discussion::SufficiencyConfig run_sufficiency(const Run& run) {
  discussion::SufficiencyConfig c;
  const Json d = run.config.value("discussion", Json::object());
  c.confidence_threshold = d.value("confidence_threshold", c.confidence_threshold);
  c.max_iterations = d.value("max_iterations", c.max_iterations);
  return c;
}

}  // namespace

ReportDecision final_decision(const Run& run) {
  if (run.state == RunState::kAborted || run.iterations.empty()) return ReportDecision::kInconclusive;
  const auto& last = run.iterations.back();
  if (!last.verdict) return ReportDecision::kInconclusive;
  const auto action = discussion::decide_next(*last.verdict, run_sufficiency(run), last.plan);
  return action.finalize ? action.decision : ReportDecision::kInconclusive;
}

Json generate_report(const Run& run, std::int64_t now_ms) {
  if (run.state != RunState::kReporting && run.state != RunState::kFinished && run.state != RunState::kAborted)
    throw Error("IncompleteRun", "run " + run.run_id + " is " + to_string(run.state));

  const std::string property = run.canonical ? to_string(run.canonical->claim.property) : "";
  const auto sufficiency = run_sufficiency(run);
  Json iterations = Json::array();
  for (const auto& it : run.iterations) {
    Json block = {{"iteration", it.iteration}, {"plan", {{"n_trials", it.plan.n_trials}, {"fmax", it.plan.fmax}}}};
    std::vector<calc::UnitOutcome> outcomes;
    if (it.spec) {
      block["spec_summary"] = spec_summary(*it.spec);
      outcomes.assign(it.spec->failures.begin(), it.spec->failures.end());
    } else {
      block["spec_summary"] = nullptr;
    }
    outcomes.insert(outcomes.end(), it.outcomes.begin(), it.outcomes.end());
    calc::sort_by_unit_id(outcomes);
    Json rows = Json::array();
    for (const auto& o : outcomes) rows.push_back(result_row(o, property));
    block["results"] = rows;

    block["evidence"] = nullptr;
    if (run.canonical && !outcomes.empty()) {
      try {
        block["evidence"] = to_json(discussion::summarize_evidence(outcomes, run.canonical->claim));
      } catch (const Error&) {
      }
    }
    if (it.verdict) {
      const Json v = to_json(*it.verdict);
      block["transcript"] = v.at("transcript");
      block["verdict"] = {{"strategy", v.at("strategy")},
                          {"decision", v.at("decision")},
                          {"confidence", v.at("confidence")}};
      const auto action = discussion::decide_next(*it.verdict, sufficiency, it.plan);
      if (action.finalize)
        block["next_action"] = {{"action", "finalize"}, {"decision", to_string(action.decision)}};
      else
        block["next_action"] = {{"action", "revise"}, {"revision", to_json(action.revision)}};
    } else {
      block["transcript"] = nullptr;
      block["verdict"] = nullptr;
      block["next_action"] = nullptr;
    }
    iterations.push_back(std::move(block));
  }

  Json report = {{"run_id", run.run_id},
                 {"hypothesis_text", run.hypothesis.text},
                 {"revision_policy", "revisions change the experiment plan (trials, fmax); the claim is kept fixed"},
                 {"iterations", iterations},
                 {"final_decision", to_string(final_decision(run))},
                 {"total_iterations", run.iterations.size()},
                 {"total_wall_time_ms", now_ms - run.started_at_ms},
                 {"aborted", run.state == RunState::kAborted},
                 {"abort_code", run.abort_code ? Json(*run.abort_code) : Json()}};
  if (run.canonical) {
    report["claim"] = to_json(run.canonical->claim);
    report["claim_text"] = frontend::render_claim(run.canonical->claim);
    report["category"] = calc::to_string(run.canonical->category);
    report["research_questions"] = run.canonical->research_questions;
    report["target_materials"] = run.canonical->target_materials;
  } else {
    report["claim"] = nullptr;
    report["claim_text"] = nullptr;
    report["category"] = nullptr;
    report["research_questions"] = Json::array();
    report["target_materials"] = Json::array();
  }
  return report;
}

std::string render_report(const Json& r) {
  std::ostringstream md;
  md << "# Validation report\n\n";
  md << "## Hypothesis\n\n" << r.at("hypothesis_text").get<std::string>() << "\n\n";
  md << "## Claim\n\n";
  if (r.at("claim_text").is_null()) {
    md << "No claim could be extracted.\n\n";
  } else {
    md << r.at("claim_text").get<std::string>() << "\n\n";
    md << "- category: " << cell(r.at("category")) << "\n";
    for (const auto& q : r.at("research_questions")) md << "- question: " << q.get<std::string>() << "\n";
    md << "\n";
  }

  for (const auto& it : r.at("iterations")) {
    const int k = it.at("iteration").get<int>();
    md << "## Iteration " << k << "\n\n";
    md << "### Evidence\n\n";
    md << "Plan: " << it.at("plan").at("n_trials").get<int>() << " trials per material, fmax "
       << format_number(it.at("plan").at("fmax").get<double>()) << " eV/Å.\n\n";
    if (!it.at("spec_summary").is_null()) {
      const auto& s = it.at("spec_summary");
      md << "Spec " << s.at("spec_id").get<std::string>() << ": " << s.at("n_units").get<int>() << " units, "
         << s.at("n_preexperiment_failures").get<int>() << " pre-experiment failures.\n\n";
    }
    md << "| unit | material | status | converged | value |\n|---|---|---|---|---|\n";
    for (const auto& row : it.at("results")) {
      md << "| " << cell(row.at("unit_id")) << " | " << cell(row.at("material")) << " | " << cell(row.at("status"))
         << " | " << (row.contains("converged") ? cell(row.at("converged")) : "-") << " | "
         << (row.at("status") == "ok" ? cell(row.at("value")) : escape_cell(cell(row.at("message")))) << " |\n";
    }
    md << "\n";
    if (!it.at("evidence").is_null()) {
      const auto& e = it.at("evidence");
      md << "Margin " << cell(e.at("margin")) << " ± " << cell(e.at("margin_stderr")) << ".\n\n";
    }

    md << "### Transcript\n\n";
    const auto& t = it.at("transcript");
    if (t.is_null()) {
      md << "No discussion took place.\n\n";
    } else if (t.contains("rounds")) {
      for (const auto& round : t.at("rounds")) {
        const int ri = round.at("round_index").get<int>() + 1;
        md << "- round " << ri << " supporter: " << round.at("supporter_argument").value("text", "(no argument)")
           << "\n";
        md << "- round " << ri << " skeptic: " << round.at("skeptic_argument").value("text", "(no argument)") << "\n";
      }
      md << "- judge: " << t.at("ruling").at("rationale").get<std::string>() << "\n";
      for (const auto& f : t.at("agent_failures")) md << "- agent failure: " << f.get<std::string>() << "\n";
      md << "\n";
    } else {
      for (const auto& b : t.at("votes"))
        md << "- " << b.at("agent_id").get<std::string>() << ": " << b.at("vote").get<std::string>() << " ("
           << b.at("rationale").get<std::string>() << ")\n";
      for (const auto& f : t.at("agent_failures")) md << "- agent failure: " << f.get<std::string>() << "\n";
      md << "\n";
    }

    md << "### Verdict\n\n";
    if (it.at("verdict").is_null()) {
      md << "No verdict.\n\n";
    } else {
      const auto& v = it.at("verdict");
      md << v.at("decision").get<std::string>() << " (" << v.at("strategy").get<std::string>() << ", confidence "
         << format_number(v.at("confidence").get<double>()) << ")\n\n";
      const auto& next = it.at("next_action");
      if (next.at("action") == "revise")
        md << "Revised: " << next.at("revision").at("rationale").get<std::string>() << ".\n\n";
    }
  }

  md << "## Final decision\n\n" << r.at("final_decision").get<std::string>();
  md << " after " << r.at("total_iterations").get<int>() << " iteration(s)";
  if (r.at("aborted").get<bool>()) md << "; run aborted (" << cell(r.at("abort_code")) << ")";
  md << ".\n";
  return md.str();
}

}  // namespace matloop::orchestrator
