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

#ifndef MATLOOP_DISCUSSION_HPP_
#define MATLOOP_DISCUSSION_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "matloop/agents.hpp"
#include "matloop/run_unit.hpp"
#include "matloop/spec_types.hpp"

namespace matloop::discussion {

struct MaterialEvidence {
  int n_trials = 0;
  int n_converged = 0;
  double mean = 0.0;        // over converged trials
  double sample_std = 0.0;  // n-1 denominator; 0 for a single trial
  std::string unit;
  std::vector<std::string> converged_units;
  std::vector<std::string> unconverged_units;
};

struct EvidenceSummary {
  Claim claim;
  std::map<std::string, MaterialEvidence> materials;
  // Positive supports the claim. Defined iff every side of the claim has at
  // least one converged trial.
  std::optional<double> margin;
  std::optional<double> margin_stderr;
  bool all_converged = false;
};

Json to_json(const EvidenceSummary& e);
EvidenceSummary evidence_from_json(const Json& j);

// errors: NoEvidence (no converged trial at all)
EvidenceSummary summarize_evidence(const std::vector<calc::UnitOutcome>& results, const Claim& claim);

enum class Decision { kSupported, kRefuted, kInsufficient };
std::string to_string(Decision d);
Decision decision_from_string(const std::string& s);

struct Ruling {
  Decision decision = Decision::kInsufficient;
  double confidence = 0.0;
  std::string rationale;
};

// The scripted judge's rule table:
//   supported    margin >  2·stderr and every unit converged
//   refuted      margin < -2·stderr
//   insufficient otherwise (including an undefined margin)
// confidence = min(1, |margin| / (3·stderr)); with stderr 0 it is 1 for any
// non-zero margin.
Ruling scripted_ruling(const EvidenceSummary* evidence);

enum class Vote { kYes, kNo, kAbstain };
std::string to_string(Vote v);
Vote vote_from_string(const std::string& s);

// Scripted expert: yes iff margin > t·stderr, no iff margin < -t·stderr.
Vote scripted_vote(const EvidenceSummary* evidence, double threshold);

struct DebateRound {
  int round_index = 0;
  Json supporter_argument;
  Json skeptic_argument;
};

struct DebateTranscript {
  std::vector<DebateRound> rounds;
  Ruling ruling;
  Json judge_argument;
  // One entry per agent output rejected by validate_argument.
  std::vector<std::string> agent_failures;
};

struct Ballot {
  std::string agent_id;
  Vote vote = Vote::kAbstain;
  std::string rationale;
};

struct VoteTally {
  std::vector<Ballot> votes;
  Decision decision = Decision::kInsufficient;
  double confidence = 0.0;
  std::vector<std::string> agent_failures;
};

// Majority over non-abstain votes; ties and all-abstain are insufficient.
// confidence is the fraction of non-abstain votes agreeing with the decision.
VoteTally tally(std::vector<Ballot> votes);

Json to_json(const DebateTranscript& t);
DebateTranscript transcript_from_json(const Json& j);
Json to_json(const VoteTally& t);
VoteTally tally_from_json(const Json& j);

// Called once per produced argument (debate turn or ballot), in order.
using TurnObserver = std::function<void(const Json& turn)>;

// Alternating supporter/skeptic turns for `rounds` rounds, then one judge
// ruling. A null `evidence` stands for NoEvidence: the ruling is
// insufficient with confidence 0.
// errors: InvalidRounds (< 1), MissingAgent
DebateTranscript adversarial_debate(const EvidenceSummary* evidence, const AgentSet& agents, int rounds,
                                    const TurnObserver& observer = {});

// errors: EvenPanel, MissingAgent
VoteTally expert_vote(const EvidenceSummary* evidence, const AgentSet& agents, int n_experts,
                      const TurnObserver& observer = {});

enum class Strategy { kAdversarial, kVoting };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct Verdict {
  Strategy strategy = Strategy::kAdversarial;
  Decision decision = Decision::kInsufficient;
  double confidence = 0.0;
  std::variant<DebateTranscript, VoteTally> transcript;
  int iteration = 0;
};

Verdict make_verdict(DebateTranscript t, int iteration);
Verdict make_verdict(VoteTally t, int iteration);
Json to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);

struct SufficiencyConfig {
  double confidence_threshold = 0.7;
  int max_iterations = 3;
};

struct ExperimentPlan {
  int n_trials = 3;
  double fmax = 0.05;
  bool operator==(const ExperimentPlan&) const = default;
};

struct RevisionPlan {
  ExperimentPlan next;
  std::string rationale;
};

enum class ReportDecision { kSupported, kRefuted, kInconclusive };
std::string to_string(ReportDecision d);
ReportDecision report_decision_from_string(const std::string& s);

struct NextAction {
  bool finalize = false;
  ReportDecision decision = ReportDecision::kInconclusive;  // when finalizing
  RevisionPlan revision;                                    // when revising
};

// Finalizes when a supported/refuted verdict reaches the confidence
// threshold, or when the iteration budget is spent (as inconclusive unless
// the verdict is confident). Otherwise revises the experiment: twice the
// trials and 0.4x the force threshold, claim unchanged.
NextAction decide_next(const Verdict& verdict, const SufficiencyConfig& config, const ExperimentPlan& current);

Json to_json(const RevisionPlan& p);
RevisionPlan revision_from_json(const Json& j);

}  // namespace matloop::discussion

#endif  // MATLOOP_DISCUSSION_HPP_
