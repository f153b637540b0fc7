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

#ifndef MATLOOP_AGENTS_HPP_
#define MATLOOP_AGENTS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "matloop/json_util.hpp"

namespace matloop::discussion {

// Roles an agent can be asked to play.
inline constexpr const char* kCanonicalizer = "canonicalizer";
inline constexpr const char* kSupporter = "supporter";
inline constexpr const char* kSkeptic = "skeptic";
inline constexpr const char* kJudge = "judge";
inline constexpr const char* kExpert = "expert";

// The single agent contract: a context document in, an argument document
// out. Both are JSON objects; see validate_argument for the output shape.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Json respond(const std::string& role, const Json& context) = 0;
};

// Argument documents:
//   canonicalizer: {role, claim, research_questions[], intent}
//   supporter/skeptic: {role, text, citations[]}
//   judge:  {role, text, citations[], decision, confidence, rationale}
//   expert: {role, text, citations[], vote, rationale}
// Citations are "unit:<unit_id>" or "aggregate:<field>". Returns the first
// violation, or nullopt when the document is well formed.
std::optional<std::string> validate_argument(const std::string& role, const Json& doc);

// Deterministic reference agents driven only by the evidence in the context.
class ScriptedAgent : public Agent {
 public:
  // `expert_threshold` is the personal t_k used when voting.
  explicit ScriptedAgent(double expert_threshold = 2.0) : expert_threshold_(expert_threshold) {}
  Json respond(const std::string& role, const Json& context) override;

 private:
  double expert_threshold_;
};

struct AgentSet {
  std::shared_ptr<Agent> canonicalizer;
  std::shared_ptr<Agent> supporter;
  std::shared_ptr<Agent> skeptic;
  std::shared_ptr<Agent> judge;
  std::vector<std::shared_ptr<Agent>> experts;
};

// Expert thresholds evenly spaced over [1, 3].
std::vector<double> expert_thresholds(int n_experts);

AgentSet scripted_agents(int n_experts = 5);

}  // namespace matloop::discussion

#endif  // MATLOOP_AGENTS_HPP_
