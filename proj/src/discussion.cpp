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

#include "matloop/discussion.hpp"

#include <algorithm>
#include <cmath>

#include "matloop/error.hpp"
#include "matloop/grammar.hpp"

namespace matloop::discussion {
namespace {

double stderr_of(const MaterialEvidence& m) {
  return m.n_converged > 1 ? m.sample_std / std::sqrt(static_cast<double>(m.n_converged)) : 0.0;
}

std::optional<double> json_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Json evidence_context(const EvidenceSummary* evidence) {
  return evidence ? to_json(*evidence) : Json(nullptr);
}

void require(const std::shared_ptr<Agent>& a, const char* role) {
  if (!a) throw Error("MissingAgent", std::string("no agent for role ") + role);
}

}  // namespace

Json to_json(const EvidenceSummary& e) {
  Json mats = Json::object();
  for (const auto& [key, m] : e.materials)
    mats[key] = {{"n_trials", m.n_trials},
                 {"n_converged", m.n_converged},
                 {"mean", m.mean},
                 {"sample_std", m.sample_std},
                 {"unit", m.unit},
                 {"converged_units", m.converged_units},
                 {"unconverged_units", m.unconverged_units}};
  return {{"claim", to_json(e.claim)},
          {"materials", mats},
          {"margin", e.margin ? Json(*e.margin) : Json(nullptr)},
          {"margin_stderr", e.margin_stderr ? Json(*e.margin_stderr) : Json(nullptr)},
          {"all_converged", e.all_converged}};
}

EvidenceSummary evidence_from_json(const Json& j) {
  EvidenceSummary e;
  e.claim = claim_from_json(j.at("claim"));
  for (auto it = j.at("materials").begin(); it != j.at("materials").end(); ++it) {
    MaterialEvidence m;
    m.n_trials = it->at("n_trials").get<int>();
    m.n_converged = it->at("n_converged").get<int>();
    m.mean = it->at("mean").get<double>();
    m.sample_std = it->at("sample_std").get<double>();
    m.unit = it->at("unit").get<std::string>();
    m.converged_units = it->at("converged_units").get<std::vector<std::string>>();
    m.unconverged_units = it->at("unconverged_units").get<std::vector<std::string>>();
    e.materials[it.key()] = std::move(m);
  }
  e.margin = json_opt(j, "margin");
  e.margin_stderr = json_opt(j, "margin_stderr");
  e.all_converged = j.at("all_converged").get<bool>();
  return e;
}

EvidenceSummary summarize_evidence(const std::vector<calc::UnitOutcome>& results, const Claim& claim) {
  const std::string prop = to_string(claim.property);
  EvidenceSummary e;
  e.claim = claim;
  std::map<std::string, std::vector<double>> values;
  for (const auto& o : results) {
    if (const auto* r = std::get_if<calc::SimulationResult>(&o)) {
      auto& m = e.materials[r->material];
      ++m.n_trials;
      auto it = r->properties.find(prop);
      if (r->relaxation.converged && it != r->properties.end()) {
        values[r->material].push_back(it->second.value);
        m.converged_units.push_back(r->unit_id);
      } else {
        m.unconverged_units.push_back(r->unit_id);
      }
    } else {
      const auto& f = std::get<UnitFailure>(o);
      auto& m = e.materials[f.material];
      ++m.n_trials;
      m.unconverged_units.push_back(f.unit_id);
    }
  }
  int total_converged = 0;
  for (auto& [key, m] : e.materials) {
    m.unit = unit_of(claim.property);
    const auto& v = values[key];
    m.n_converged = static_cast<int>(v.size());
    total_converged += m.n_converged;
    if (v.empty()) continue;
    double sum = 0;
    for (double x : v) sum += x;
    m.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0;
      for (double x : v) ss += (x - m.mean) * (x - m.mean);
      m.sample_std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
  }
  if (total_converged == 0) throw Error("NoEvidence", "no converged trial to reason about");

  std::vector<std::string> sides{claim.subject};
  if (const auto* ref = claim.reference_material()) sides.push_back(*ref);
  e.all_converged = true;
  for (const auto& key : sides) {
    auto it = e.materials.find(key);
    if (it == e.materials.end() || it->second.n_trials == 0 || it->second.n_converged != it->second.n_trials)
      e.all_converged = false;
  }

  auto side = [&](const std::string& key) -> const MaterialEvidence* {
    auto it = e.materials.find(key);
    return it != e.materials.end() && it->second.n_converged > 0 ? &it->second : nullptr;
  };
  const MaterialEvidence* s = side(claim.subject);
  if (!s) return e;
  double diff = 0.0, se = stderr_of(*s);
  if (const auto* q = claim.reference_value()) {
    diff = s->mean - q->value;
  } else {
    const MaterialEvidence* r = side(*claim.reference_material());
    if (!r) return e;
    diff = s->mean - r->mean;
    se = std::sqrt(se * se + stderr_of(*r) * stderr_of(*r));
  }
  switch (claim.comparator) {
    case Comparator::kGreaterThan: e.margin = diff; break;
    case Comparator::kLessThan: e.margin = -diff; break;
    case Comparator::kWithin: e.margin = claim.tolerance.value_or(0.0) - std::abs(diff); break;
  }
  e.margin_stderr = se;
  return e;
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::kSupported: return "supported";
    case Decision::kRefuted: return "refuted";
    case Decision::kInsufficient: return "insufficient";
  }
  return "";
}

Decision decision_from_string(const std::string& s) {
  if (s == "supported") return Decision::kSupported;
  if (s == "refuted") return Decision::kRefuted;
  if (s == "insufficient") return Decision::kInsufficient;
  throw Error("InvalidDecision", "unknown decision '" + s + "'");
}

Ruling scripted_ruling(const EvidenceSummary* ev) {
  if (!ev) return {Decision::kInsufficient, 0.0, "no converged evidence"};
  if (!ev->margin) return {Decision::kInsufficient, 0.0, "margin undefined: a side of the claim has no converged trial"};
  const double m = *ev->margin, se = ev->margin_stderr.value_or(0.0);
  Ruling r;
  if (se > 0.0)
    r.confidence = std::min(1.0, std::abs(m) / (3.0 * se));
  else
    r.confidence = m != 0.0 ? 1.0 : 0.0;
  const std::string ms = frontend::format_number(m), ses = frontend::format_number(se);
  if (m > 2.0 * se && ev->all_converged) {
    r.decision = Decision::kSupported;
    r.rationale = "margin " + ms + " exceeds 2x its standard error " + ses + " with every unit converged";
  } else if (m < -2.0 * se) {
    r.decision = Decision::kRefuted;
    r.rationale = "margin " + ms + " is below -2x its standard error " + ses;
  } else {
    r.decision = Decision::kInsufficient;
    r.rationale = ev->all_converged ? "margin " + ms + " is within 2x its standard error " + ses
                                    : "margin " + ms + " with unconverged units";
  }
  return r;
}

std::string to_string(Vote v) {
  switch (v) {
    case Vote::kYes: return "yes";
    case Vote::kNo: return "no";
    case Vote::kAbstain: return "abstain";
  }
  return "";
}

Vote vote_from_string(const std::string& s) {
  if (s == "yes") return Vote::kYes;
  if (s == "no") return Vote::kNo;
  if (s == "abstain") return Vote::kAbstain;
  throw Error("InvalidVote", "unknown vote '" + s + "'");
}

Vote scripted_vote(const EvidenceSummary* ev, double t) {
  if (!ev || !ev->margin) return Vote::kAbstain;
  const double m = *ev->margin, se = ev->margin_stderr.value_or(0.0);
  if (m > t * se) return Vote::kYes;
  if (m < -t * se) return Vote::kNo;
  return Vote::kAbstain;
}

VoteTally tally(std::vector<Ballot> votes) {
  VoteTally t;
  int yes = 0, no = 0;
  for (const auto& b : votes) {
    if (b.vote == Vote::kYes) ++yes;
    if (b.vote == Vote::kNo) ++no;
  }
  t.votes = std::move(votes);
  if (yes > no) {
    t.decision = Decision::kSupported;
    t.confidence = static_cast<double>(yes) / (yes + no);
  } else if (no > yes) {
    t.decision = Decision::kRefuted;
    t.confidence = static_cast<double>(no) / (yes + no);
  }
  return t;
}

Json to_json(const DebateTranscript& t) {
  Json rounds = Json::array();
  for (const auto& r : t.rounds)
    rounds.push_back({{"round_index", r.round_index},
                      {"supporter_argument", r.supporter_argument},
                      {"skeptic_argument", r.skeptic_argument}});
  return {{"rounds", rounds},
          {"ruling",
           {{"decision", to_string(t.ruling.decision)},
            {"confidence", t.ruling.confidence},
            {"rationale", t.ruling.rationale}}},
          {"judge_argument", t.judge_argument},
          {"agent_failures", t.agent_failures}};
}

DebateTranscript transcript_from_json(const Json& j) {
  DebateTranscript t;
  for (const auto& r : j.at("rounds"))
    t.rounds.push_back({r.at("round_index").get<int>(), r.at("supporter_argument"), r.at("skeptic_argument")});
  const auto& ru = j.at("ruling");
  t.ruling = {decision_from_string(ru.at("decision").get<std::string>()), ru.at("confidence").get<double>(),
              ru.at("rationale").get<std::string>()};
  t.judge_argument = j.value("judge_argument", Json(nullptr));
  t.agent_failures = j.value("agent_failures", std::vector<std::string>{});
  return t;
}

Json to_json(const VoteTally& t) {
  Json votes = Json::array();
  for (const auto& b : t.votes)
    votes.push_back({{"agent_id", b.agent_id}, {"vote", to_string(b.vote)}, {"rationale", b.rationale}});
  return {{"votes", votes},
          {"decision", to_string(t.decision)},
          {"confidence", t.confidence},
          {"agent_failures", t.agent_failures}};
}

VoteTally tally_from_json(const Json& j) {
  VoteTally t;
  for (const auto& b : j.at("votes"))
    t.votes.push_back({b.at("agent_id").get<std::string>(), vote_from_string(b.at("vote").get<std::string>()),
                       b.at("rationale").get<std::string>()});
  t.decision = decision_from_string(j.at("decision").get<std::string>());
  t.confidence = j.at("confidence").get<double>();
  t.agent_failures = j.value("agent_failures", std::vector<std::string>{});
  return t;
}

DebateTranscript adversarial_debate(const EvidenceSummary* evidence, const AgentSet& agents, int rounds,
                                    const TurnObserver& observer) {
  if (rounds < 1) throw Error("InvalidRounds", "debate needs at least one round");
  require(agents.supporter, kSupporter);
  require(agents.skeptic, kSkeptic);
  require(agents.judge, kJudge);

  DebateTranscript t;
  const Json ev = evidence_context(evidence);
  Json history = Json::array();
  auto ask = [&](Agent& agent, const char* role, int round) {
    Json ctx{{"role", role}, {"round", round}, {"rounds", rounds}, {"evidence", ev}, {"transcript", history}};
    Json doc;
    std::optional<std::string> problem;
    try {
      doc = agent.respond(role, ctx);
      problem = validate_argument(role, doc);
    } catch (const std::exception& e) {
      problem = std::string("agent error: ") + e.what();
    }
    if (problem) {
      t.agent_failures.push_back(std::string(role) + " (round " + std::to_string(round) + "): " + *problem);
      doc = {{"role", role}, {"error", *problem}};
    }
    history.push_back(doc);
    if (observer) observer({{"round", round}, {"role", role}, {"argument", doc}});
    return doc;
  };

  for (int r = 0; r < rounds; ++r) {
    DebateRound dr;
    dr.round_index = r;
    dr.supporter_argument = ask(*agents.supporter, kSupporter, r);
    dr.skeptic_argument = ask(*agents.skeptic, kSkeptic, r);
    t.rounds.push_back(std::move(dr));
  }
  t.judge_argument = ask(*agents.judge, kJudge, rounds);
  if (!evidence) {
    t.ruling = {Decision::kInsufficient, 0.0, "no converged evidence"};
  } else if (!t.agent_failures.empty()) {
    t.ruling = {Decision::kInsufficient, 0.0, "agent failure: " + t.agent_failures.front()};
  } else {
    t.ruling = {decision_from_string(t.judge_argument.at("decision").get<std::string>()),
                t.judge_argument.at("confidence").get<double>(),
                t.judge_argument.at("rationale").get<std::string>()};
  }
  return t;
}

std::vector<double> expert_thresholds(int n) {
  std::vector<double> t;
  for (int k = 0; k < n; ++k) t.push_back(n == 1 ? 2.0 : 1.0 + 2.0 * k / (n - 1));
  return t;
}

VoteTally expert_vote(const EvidenceSummary* evidence, const AgentSet& agents, int n_experts,
                      const TurnObserver& observer) {
  if (n_experts % 2 == 0) throw Error("EvenPanel", "expert panel size must be odd");
  if (n_experts < 3) throw Error("EvenPanel", "expert panel needs at least 3 members");
  if (static_cast<int>(agents.experts.size()) < n_experts)
    throw Error("MissingAgent", "fewer expert agents than the panel size");

  const Json ev = evidence_context(evidence);
  std::vector<Ballot> ballots;
  std::vector<std::string> failures;
  for (int k = 0; k < n_experts; ++k) {
    const std::string id = "expert-" + std::to_string(k);
    Json ctx{{"role", kExpert}, {"expert_index", k}, {"panel_size", n_experts}, {"evidence", ev}};
    Json doc;
    std::optional<std::string> problem;
    try {
      require(agents.experts[k], kExpert);
      doc = agents.experts[k]->respond(kExpert, ctx);
      problem = validate_argument(kExpert, doc);
    } catch (const std::exception& e) {
      problem = std::string("agent error: ") + e.what();
    }
    Ballot b{id, Vote::kAbstain, ""};
    if (problem) {
      failures.push_back(id + ": " + *problem);
      b.rationale = "abstained after invalid output: " + *problem;
      doc = {{"role", kExpert}, {"error", *problem}, {"vote", "abstain"}};
    } else {
      b.vote = vote_from_string(doc.at("vote").get<std::string>());
      b.rationale = doc.at("rationale").get<std::string>();
    }
    if (observer) observer({{"round", 0}, {"role", kExpert}, {"agent_id", id}, {"argument", doc}});
    ballots.push_back(std::move(b));
  }
  VoteTally t = tally(std::move(ballots));
  t.agent_failures = std::move(failures);
  return t;
}

std::string to_string(Strategy s) { return s == Strategy::kAdversarial ? "adversarial" : "voting"; }

Strategy strategy_from_string(const std::string& s) {
  if (s == "adversarial") return Strategy::kAdversarial;
  if (s == "voting") return Strategy::kVoting;
  throw Error("InvalidStrategy", "unknown strategy '" + s + "'");
}

Verdict make_verdict(DebateTranscript t, int iteration) {
  Verdict v;
  v.strategy = Strategy::kAdversarial;
  v.decision = t.ruling.decision;
  v.confidence = t.ruling.confidence;
  v.transcript = std::move(t);
  v.iteration = iteration;
  return v;
}

Verdict make_verdict(VoteTally t, int iteration) {
  Verdict v;
  v.strategy = Strategy::kVoting;
  v.decision = t.decision;
  v.confidence = t.confidence;
  v.transcript = std::move(t);
  v.iteration = iteration;
  return v;
}

Json to_json(const Verdict& v) {
  Json transcript = std::visit([](const auto& t) { return to_json(t); }, v.transcript);
  return {{"strategy", to_string(v.strategy)},
          {"decision", to_string(v.decision)},
          {"confidence", v.confidence},
          {"transcript", transcript},
          {"iteration", v.iteration}};
}

Verdict verdict_from_json(const Json& j) {
  const Strategy s = strategy_from_string(j.at("strategy").get<std::string>());
  Verdict v = s == Strategy::kAdversarial ? make_verdict(transcript_from_json(j.at("transcript")), 0)
                                          : make_verdict(tally_from_json(j.at("transcript")), 0);
  v.decision = decision_from_string(j.at("decision").get<std::string>());
  v.confidence = j.at("confidence").get<double>();
  v.iteration = j.at("iteration").get<int>();
  return v;
}

std::string to_string(ReportDecision d) {
  switch (d) {
    case ReportDecision::kSupported: return "supported";
    case ReportDecision::kRefuted: return "refuted";
    case ReportDecision::kInconclusive: return "inconclusive";
  }
  return "";
}

ReportDecision report_decision_from_string(const std::string& s) {
  if (s == "supported") return ReportDecision::kSupported;
  if (s == "refuted") return ReportDecision::kRefuted;
  if (s == "inconclusive") return ReportDecision::kInconclusive;
  throw Error("InvalidDecision", "unknown report decision '" + s + "'");
}

NextAction decide_next(const Verdict& verdict, const SufficiencyConfig& config, const ExperimentPlan& current) {
  NextAction a;
  const bool decisive = verdict.decision != Decision::kInsufficient;
  if (decisive && verdict.confidence >= config.confidence_threshold) {
    a.finalize = true;
    a.decision = verdict.decision == Decision::kSupported ? ReportDecision::kSupported : ReportDecision::kRefuted;
    return a;
  }
  if (verdict.iteration + 1 >= config.max_iterations) {
    a.finalize = true;
    a.decision = ReportDecision::kInconclusive;
    return a;
  }
  a.revision.next = {current.n_trials * 2, current.fmax * 0.4};
  a.revision.rationale = "confidence " + frontend::format_number(verdict.confidence) + " (" +
                         to_string(verdict.decision) + ") below threshold " +
                         frontend::format_number(config.confidence_threshold) + "; doubling trials to " +
                         std::to_string(a.revision.next.n_trials) + " and tightening fmax to " +
                         frontend::format_number(a.revision.next.fmax) + " eV/Å, claim unchanged";
  return a;
}

Json to_json(const RevisionPlan& p) {
  return {{"n_trials", p.next.n_trials}, {"fmax", p.next.fmax}, {"rationale", p.rationale}};
}

RevisionPlan revision_from_json(const Json& j) {
  return {{j.at("n_trials").get<int>(), j.at("fmax").get<double>()}, j.at("rationale").get<std::string>()};
}

}  // namespace matloop::discussion
