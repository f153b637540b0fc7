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

#ifndef MATLOOP_LLM_AGENT_HPP_
#define MATLOOP_LLM_AGENT_HPP_

#include <chrono>
#include <string>

#include "matloop/agents.hpp"

namespace matloop::discussion {

// Endpoint is the full chat-completions URL, e.g.
// "https://api.example.com/v1/chat/completions". The key is read from the
// environment variable named by `api_key_env` at call time.
struct LlmConfig {
  std::string endpoint;
  std::string model;
  std::string api_key_env = "MATLOOP_LLM_API_KEY";
  double temperature = 0.0;
  std::chrono::seconds timeout{120};
};

LlmConfig llm_config_from_json(const Json& j);

// Sends the role prompt plus the canonical context document as an
// OpenAI-style chat request and parses the reply content as JSON. Transport
// and parse errors throw Error("AgentFailure"); shape checks are left to the
// caller (validate_argument), which falls back to insufficient.
class LlmAgent : public Agent {
 public:
  explicit LlmAgent(LlmConfig config) : config_(std::move(config)) {}
  Json respond(const std::string& role, const Json& context) override;

  // The request body for a turn; exposed for tests.
  Json request_body(const std::string& role, const Json& context) const;

 private:
  LlmConfig config_;
};

std::string role_prompt(const std::string& role);

// All roles played by one LlmAgent.
AgentSet llm_agents(const LlmConfig& config, int n_experts);

}  // namespace matloop::discussion

#endif  // MATLOOP_LLM_AGENT_HPP_
