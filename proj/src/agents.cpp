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

#include "matloop/agents.hpp"

#include <cmath>

#include "matloop/discussion.hpp"
#include "matloop/error.hpp"
#include "matloop/grammar.hpp"

namespace matloop::discussion {
namespace {

using frontend::format_number;

bool is_citation(const Json& c) {
  if (!c.is_string()) return false;
  const auto& s = c.get_ref<const std::string&>();
  return (s.rfind("unit:", 0) == 0 && s.size() > 5) || (s.rfind("aggregate:", 0) == 0 && s.size() > 10);
}

struct Argument {
  std::vector<std::string> sentences;
  std::vector<std::string> citations;

  void add(std::string sentence, std::initializer_list<std::string> cites) {
    sentences.push_back(std::move(sentence));
    citations.insert(citations.end(), cites);
  }
  void cite_units(const std::vector<std::string>& ids) {
    for (const auto& id : ids) citations.push_back("unit:" + id);
  }
  Json doc(const std::string& role) const {
    std::string text;
    for (const auto& s : sentences) text += (text.empty() ? "" : " ") + s;
    return {{"role", role}, {"text", text}, {"citations", citations}};
  }
};

std::optional<EvidenceSummary> read_evidence(const Json& context) {
  if (!context.contains("evidence") || context.at("evidence").is_null()) return std::nullopt;
  return evidence_from_json(context.at("evidence"));
}

Json supporter(const std::optional<EvidenceSummary>& ev, int round) {
  Argument a;
  const std::string prefix = "Round " + std::to_string(round + 1) + ": ";
  if (!ev) {
    a.add(prefix + "no converged trial is available, so nothing contradicts the claim yet.",
          {"aggregate:margin"});
    return a.doc(kSupporter);
  }
  if (ev->margin && *ev->margin > 2.0 * ev->margin_stderr.value_or(0.0))
    a.add(prefix + "the margin " + format_number(*ev->margin) + " exceeds twice its standard error " +
              format_number(ev->margin_stderr.value_or(0.0)) + ".",
          {"aggregate:margin", "aggregate:margin_stderr"});
  for (const auto& [key, m] : ev->materials) {
    if (m.n_converged > 0 && m.n_converged == m.n_trials) {
      a.add("All " + std::to_string(m.n_trials) + " trials of " + key + " converged (mean " +
                format_number(m.mean) + " " + m.unit + ").",
            {"aggregate:materials." + key + ".n_converged"});
      a.cite_units(m.converged_units);
    }
  }
  if (a.sentences.empty())
    a.add(prefix + "the converged trials are consistent with the claimed direction.", {"aggregate:margin"});
  return a.doc(kSupporter);
}

Json skeptic(const std::optional<EvidenceSummary>& ev, int round) {
  Argument a;
  const std::string prefix = "Round " + std::to_string(round + 1) + ": ";
  if (!ev) {
    a.add(prefix + "there is no converged evidence at all.", {"aggregate:n_converged"});
    return a.doc(kSkeptic);
  }
  const double se = ev->margin_stderr.value_or(0.0);
  if (!ev->margin)
    a.add(prefix + "the margin is undefined because one side of the claim has no converged trial.",
          {"aggregate:margin"});
  else if (std::abs(*ev->margin) <= 2.0 * se)
    a.add(prefix + "the margin " + format_number(*ev->margin) + " is within twice its standard error " +
              format_number(se) + ".",
          {"aggregate:margin", "aggregate:margin_stderr"});
  else if (*ev->margin < 0.0)
    a.add(prefix + "the margin " + format_number(*ev->margin) + " points against the claim.",
          {"aggregate:margin"});
  for (const auto& [key, m] : ev->materials) {
    if (m.n_converged < m.n_trials) {
      a.add(std::to_string(m.n_trials - m.n_converged) + " of " + std::to_string(m.n_trials) + " trials of " +
                key + " did not converge.",
            {"aggregate:materials." + key + ".n_converged"});
      a.cite_units(m.unconverged_units);
    }
  }
  if (a.sentences.empty()) {
    int n = 0;
    for (const auto& [key, m] : ev->materials) n += m.n_converged;
    a.add(prefix + "the conclusion rests on " + std::to_string(n) +
              " converged trials of a single interatomic potential.",
          {"aggregate:margin_stderr"});
  }
  return a.doc(kSkeptic);
}

}  // namespace

std::optional<std::string> validate_argument(const std::string& role, const Json& doc) {
  if (!doc.is_object()) return "argument must be a JSON object";
  if (!doc.contains("role") || doc.at("role") != role) return "argument role does not match '" + role + "'";
  if (role == kCanonicalizer) {
    if (!doc.contains("claim") || !doc.at("claim").is_object()) return "missing claim object";
    if (!doc.contains("research_questions") || !doc.at("research_questions").is_array() ||
        doc.at("research_questions").empty())
      return "missing research_questions";
    for (const auto& q : doc.at("research_questions"))
      if (!q.is_string() || q.get_ref<const std::string&>().empty()) return "research questions must be non-empty strings";
    if (doc.contains("intent") && !doc.at("intent").is_string()) return "intent must be a string";
    return std::nullopt;
  }
  if (!doc.contains("text") || !doc.at("text").is_string() || doc.at("text").get_ref<const std::string&>().empty())
    return "missing argument text";
  if (!doc.contains("citations") || !doc.at("citations").is_array() || doc.at("citations").empty())
    return "an argument must cite at least one unit or aggregate";
  for (const auto& c : doc.at("citations"))
    if (!is_citation(c)) return "citations must be 'unit:<id>' or 'aggregate:<field>'";
  if (role == kJudge) {
    if (!doc.contains("decision") || !doc.at("decision").is_string()) return "judge must return a decision";
    const auto& d = doc.at("decision").get_ref<const std::string&>();
    if (d != "supported" && d != "refuted" && d != "insufficient") return "unknown decision '" + d + "'";
    if (!doc.contains("confidence") || !doc.at("confidence").is_number()) return "judge must return a confidence";
    const double c = doc.at("confidence").get<double>();
    if (!(c >= 0.0 && c <= 1.0)) return "confidence must lie in [0, 1]";
    if (!doc.contains("rationale") || !doc.at("rationale").is_string()) return "judge must return a rationale";
  } else if (role == kExpert) {
    if (!doc.contains("vote") || !doc.at("vote").is_string()) return "expert must return a vote";
    const auto& v = doc.at("vote").get_ref<const std::string&>();
    if (v != "yes" && v != "no" && v != "abstain") return "unknown vote '" + v + "'";
    if (!doc.contains("rationale") || !doc.at("rationale").is_string()) return "expert must return a rationale";
  } else if (role != kSupporter && role != kSkeptic) {
    return "unknown role '" + role + "'";
  }
  return std::nullopt;
}

Json ScriptedAgent::respond(const std::string& role, const Json& context) {
  if (role == kCanonicalizer) {
    const auto text = context.at("hypothesis_text").get<std::string>();
    Claim claim;
    try {
      claim = frontend::parse_claim(text);
    } catch (const Error& e) {
      return {{"role", role}, {"error", e.what()}};
    }
    return {{"role", role},
            {"claim", to_json(claim)},
            {"research_questions", {frontend::research_question(claim)}},
            {"intent", claim.form() == ClaimForm::kThreshold ? "verify" : "compare"}};
  }
  const auto ev = read_evidence(context);
  const int round = context.value("round", 0);
  if (role == kSupporter) return supporter(ev, round);
  if (role == kSkeptic) return skeptic(ev, round);
  if (role == kJudge) {
    const Ruling r = scripted_ruling(ev ? &*ev : nullptr);
    return {{"role", role},
            {"text", "Ruling: " + to_string(r.decision) + ". " + r.rationale + "."},
            {"citations", {"aggregate:margin", "aggregate:margin_stderr", "aggregate:all_converged"}},
            {"decision", to_string(r.decision)},
            {"confidence", r.confidence},
            {"rationale", r.rationale}};
  }
  if (role == kExpert) {
    const Vote v = scripted_vote(ev ? &*ev : nullptr, expert_threshold_);
    std::string why = "threshold " + format_number(expert_threshold_) + "x stderr";
    if (ev && ev->margin)
      why = "margin " + format_number(*ev->margin) + " vs " + why + " (" +
            format_number(expert_threshold_ * ev->margin_stderr.value_or(0.0)) + ")";
    else
      why = "margin undefined; " + why;
    return {{"role", role},
            {"text", "Vote " + to_string(v) + ": " + why + "."},
            {"citations", {"aggregate:margin", "aggregate:margin_stderr"}},
            {"vote", to_string(v)},
            {"rationale", why}};
  }
  throw Error("UnknownRole", "scripted agent cannot play '" + role + "'");
}

AgentSet scripted_agents(int n_experts) {
  AgentSet set;
  auto shared = std::make_shared<ScriptedAgent>();
  set.canonicalizer = shared;
  set.supporter = shared;
  set.skeptic = shared;
  set.judge = shared;
  for (double t : expert_thresholds(n_experts)) set.experts.push_back(std::make_shared<ScriptedAgent>(t));
  return set;
}

}  // namespace matloop::discussion
