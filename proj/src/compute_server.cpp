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

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(canonical_dump(body), "application/json");
}

Json error_body(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

struct JobServer::Impl {
  httplib::Server server;
};

JobServer::JobServer(int workers, std::size_t queue_bound)
    : manager_(workers, queue_bound), impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;

  srv.Post("/v1/jobs", [this](const httplib::Request& req, httplib::Response& res) {
    Json doc;
    try {
      doc = Json::parse(req.body);
    } catch (const Json::exception& e) {
      send_json(res, 400, error_body("invalid_json", e.what()));
      return;
    }
    try {
      send_json(res, 201, {{"job_id", manager_.submit(doc)}});
    } catch (const SchemaRejected& e) {
      Json diags = Json::array();
      for (const auto& d : e.diagnostics()) diags.push_back(to_json(d));
      Json body = error_body("schema_rejected", e.what());
      body["error"]["diagnostics"] = diags;
      send_json(res, 400, body);
    } catch (const Error& e) {
      if (e.code() == "Overloaded")
        send_json(res, 503, error_body("overloaded", e.what()));
      else
        send_json(res, 400, error_body("schema_rejected", e.what()));
    }
  });

  srv.Get(R"(/v1/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, to_json(manager_.status(req.matches[1])));
    } catch (const Error& e) {
      send_json(res, 404, error_body("unknown_job", e.what()));
    }
  });

  srv.Get(R"(/v1/jobs/([^/]+)/results)", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, {{"results", calc::to_json(manager_.results(req.matches[1]))}});
    } catch (const Error& e) {
      if (e.code() == "NotFinished")
        send_json(res, 409, error_body("not_finished", e.what()));
      else
        send_json(res, 404, error_body("unknown_job", e.what()));
    }
  });
}

JobServer::~JobServer() { stop(); }

int JobServer::start(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    port_ = srv.bind_to_any_port(host);
  } else {
    if (!srv.bind_to_port(host, port)) port_ = -1;
    else port_ = port;
  }
  if (port_ <= 0) throw Error("BindFailed", "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  return port_;
}

void JobServer::listen_blocking(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) throw Error("BindFailed", "cannot bind " + host + ":" + std::to_string(port));
}

void JobServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace matloop::compute
