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

#include <httplib.h>

#include "matloop/compute.hpp"

namespace matloop::compute {

namespace {

Json parse_body(const httplib::Result& r, const std::string& what) {
  if (!r) throw Error("BackendUnreachable", what + ": " + httplib::to_string(r.error()));
  try {
    return Json::parse(r->body);
  } catch (const Json::exception&) {
    throw Error("ProtocolError", what + ": response is not JSON (status " + std::to_string(r->status) + ")");
  }
}

std::string error_message(const Json& body) {
  if (body.contains("error") && body["error"].contains("message")) return body["error"]["message"].get<std::string>();
  return body.dump();
}

}  // namespace

RemoteBackend::RemoteBackend(std::string base_url, RemoteOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string RemoteBackend::submit(const Json& spec_document) {
  httplib::Client cli(base_url_);
  auto r = cli.Post("/v1/jobs", canonical_dump(spec_document), "application/json");
  Json body = parse_body(r, "submit");
  if (r->status == 201) return body.at("job_id").get<std::string>();
  if (r->status == 503) throw Error("Overloaded", error_message(body));
  if (r->status == 400 && body["error"].value("code", "") == "schema_rejected") {
    std::vector<Diagnostic> diags;
    for (const auto& d : body["error"].value("diagnostics", Json::array()))
      diags.push_back({d.value("path", ""), d.value("rule", ""), d.value("message", "")});
    throw SchemaRejected(std::move(diags));
  }
  throw Error("ProtocolError", "submit: status " + std::to_string(r->status) + ": " + error_message(body));
}

JobStatus RemoteBackend::status(const std::string& job_id) {
  httplib::Client cli(base_url_);
  auto r = cli.Get("/v1/jobs/" + job_id);
  Json body = parse_body(r, "status");
  if (r->status == 404) throw Error("UnknownJob", error_message(body));
  if (r->status != 200) throw Error("ProtocolError", "status: status " + std::to_string(r->status));
  return {job_state_from_string(body.at("state").get<std::string>()), body.at("completed_units").get<int>(),
          body.at("total_units").get<int>()};
}

std::vector<UnitOutcome> RemoteBackend::results(const std::string& job_id) {
  httplib::Client cli(base_url_);
  auto r = cli.Get("/v1/jobs/" + job_id + "/results");
  Json body = parse_body(r, "results");
  if (r->status == 404) throw Error("UnknownJob", error_message(body));
  if (r->status == 409) throw Error("NotFinished", error_message(body));
  if (r->status != 200) throw Error("ProtocolError", "results: status " + std::to_string(r->status));
  return calc::outcomes_from_json(body.at("results"));
}

// The server always runs the whole spec (a partial spec would fail grid
// coverage); skipped units are dropped on arrival.
std::vector<UnitOutcome> RemoteBackend::execute(const ExperimentSpec& spec, const ProgressFn& progress,
                                                const std::set<std::string>& skip) {
  const std::string id = submit(to_json(spec));
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  while (true) {
    JobStatus st = status(id);
    if (st.state == JobState::kDone) break;
    if (st.state == JobState::kFailed) throw Error("JobFailed", "remote job " + id + " failed");
    if (std::chrono::steady_clock::now() > deadline) throw Error("BackendUnreachable", "remote job " + id + " timed out");
    std::this_thread::sleep_for(options_.poll_interval);
  }
  std::vector<UnitOutcome> out;
  for (auto& o : results(id)) {
    if (skip.count(calc::unit_id_of(o))) continue;
    if (progress) progress(o);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace matloop::compute
