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

#include "matloop/llm_agent.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>

#include "matloop/error.hpp"

namespace matloop::discussion {

namespace {

const char* kShape =
    "Reply with a single JSON object and nothing else. Every argument must contain \"role\", a non-empty "
    "\"text\" and a non-empty \"citations\" list whose entries are \"unit:<unit_id>\" or "
    "\"aggregate:<field>\" naming fields of the evidence document.";

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error("AgentFailure", "malformed endpoint '" + url + "'");
  return {m[1], m[2].matched ? std::string(m[2]) : "/"};
}

}  // namespace

LlmConfig llm_config_from_json(const Json& j) {
  LlmConfig c;
  try {
    c.endpoint = j.at("endpoint").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.temperature = j.value("temperature", c.temperature);
    c.timeout = std::chrono::seconds(j.value("timeout_s", static_cast<int>(c.timeout.count())));
  } catch (const Json::exception& e) {
    throw Error("InvalidConfig", std::string("llm config: ") + e.what());
  }
  if (c.endpoint.rfind("http://", 0) != 0 && c.endpoint.rfind("https://", 0) != 0)
    throw Error("InvalidConfig", "llm endpoint must be an http(s) URL");
  return c;
}

std::string role_prompt(const std::string& role) {
  std::string p;
  if (role == kCanonicalizer)
    p = "You turn a materials hypothesis into a structured claim. Return {\"role\":\"canonicalizer\", "
        "\"claim\":{...}, \"research_questions\":[...], \"intent\":\"verify\"|\"compare\"}. The claim object uses "
        "the fields property, subject, comparator, reference and optional tolerance.";
  else if (role == kSupporter)
    p = "You argue that the experimental evidence supports the claim. Return {\"role\":\"supporter\", \"text\", "
        "\"citations\"}.";
  else if (role == kSkeptic)
    p = "You challenge the claim using weaknesses in the experimental evidence. Return {\"role\":\"skeptic\", "
        "\"text\", \"citations\"}.";
  else if (role == kJudge)
    p = "You weigh the supporter and skeptic arguments against the evidence. Return {\"role\":\"judge\", "
        "\"text\", \"citations\", \"decision\":\"supported\"|\"refuted\"|\"insufficient\", \"confidence\" in "
        "[0,1], \"rationale\"}.";
  else if (role == kExpert)
    p = "You are an independent materials scientist voting on the claim. Return {\"role\":\"expert\", \"text\", "
        "\"citations\", \"vote\":\"yes\"|\"no\"|\"abstain\", \"rationale\"}.";
  else
    throw Error("UnknownRole", "no prompt for role '" + role + "'");
  if (role != kCanonicalizer) p += std::string(" ") + kShape;
  else p += " Reply with a single JSON object and nothing else.";
  return p;
}

Json LlmAgent::request_body(const std::string& role, const Json& context) const {
  return {{"model", config_.model},
          {"temperature", config_.temperature},
          {"response_format", {{"type", "json_object"}}},
          {"messages",
           {{{"role", "system"}, {"content", role_prompt(role)}},
            {{"role", "user"}, {"content", canonical_dump(context)}}}}};
}

Json LlmAgent::respond(const std::string& role, const Json& context) {
  const SplitUrl url = split_url(config_.endpoint);
  httplib::Client cli(url.origin);
  cli.set_read_timeout(config_.timeout);
  cli.set_connection_timeout(std::chrono::seconds(10));
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto r = cli.Post(url.path, headers, canonical_dump(request_body(role, context)), "application/json");
  if (!r) throw Error("AgentFailure", "LLM endpoint unreachable: " + httplib::to_string(r.error()));
  if (r->status != 200) throw Error("AgentFailure", "LLM endpoint returned status " + std::to_string(r->status));
  try {
    const Json reply = Json::parse(r->body);
    const auto content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    return Json::parse(content);
  } catch (const Json::exception& e) {
    throw Error("AgentFailure", std::string("unusable LLM reply: ") + e.what());
  }
}

AgentSet llm_agents(const LlmConfig& config, int n_experts) {
  auto agent = std::make_shared<LlmAgent>(config);
  AgentSet set{agent, agent, agent, agent, {}};
  for (int i = 0; i < n_experts; ++i) set.experts.push_back(agent);
  return set;
}

}  // namespace matloop::discussion
