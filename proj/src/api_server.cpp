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

#include "matloop/api_server.hpp"

#include <httplib.h>

#include "matloop/error.hpp"
#include "matloop/grammar.hpp"
#include "matloop/report.hpp"

namespace matloop::orchestrator {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(canonical_dump(body), "application/json");
}

Json error_body(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

Json summary(const Run& r) {
  return {{"run_id", r.run_id},
          {"hypothesis_text", r.hypothesis.text},
          {"state", to_string(r.state)},
          {"iteration", r.iteration},
          {"last_seq", r.last_seq},
          {"final_decision", r.report ? r.report->at("final_decision") : Json()}};
}

class BadRequest : public Error {
 public:
  using Error::Error;
};

}  // namespace

std::string sse_frame(const RunEvent& e) {
  return "event: " + to_string(e.kind) + "\nid: " + std::to_string(e.seq) + "\ndata: " + canonical_dump(e.payload) +
         "\n\n";
}

struct ApiServer::Impl {
  httplib::Server server;
};

ApiServer::ApiServer(RunStore& store, RunConfig defaults, RunHooks hooks)
    : store_(store), defaults_(std::move(defaults)), hooks_(std::move(hooks)), impl_(std::make_unique<Impl>()) {
  routes();
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::set_static_dir(const std::string& dir) {
  if (!impl_->server.set_mount_point("/", dir)) throw Error("InvalidStaticDir", "cannot serve " + dir);
}

std::string ApiServer::launch(const Json& body) {
  if (!body.is_object() || !body.contains("hypothesis_text") || !body.at("hypothesis_text").is_string())
    throw BadRequest("InvalidRequest", "body must be an object with a hypothesis_text string");
  Json cfg = to_json(defaults_);
  if (body.contains("config")) {
    if (!body.at("config").is_object()) throw BadRequest("InvalidConfig", "config must be an object");
    cfg.merge_patch(body.at("config"));
  }
  const RunConfig config = run_config_from_json(cfg);

  Hypothesis h;
  h.text = body.at("hypothesis_text").get<std::string>();
  if (h.text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw BadRequest("EmptyHypothesis", "hypothesis text is empty");
  if (config.agent_mode == "scripted") frontend::parse_claim(h.text);  // fail fast with the grammar diagnostic

  auto active = std::make_unique<ActiveRun>();
  active->hooks = hooks_;
  active->hooks.abort = &active->abort;
  const Run created = create_run(h, config, store_, active->hooks);
  ActiveRun* raw = active.get();
  std::lock_guard lock(mu_);
  if (stopping_) throw Error("ShuttingDown", "server is stopping");
  raw->thread = std::thread([this, raw, id = created.run_id] {
    try {
      resume_run(id, store_, raw->hooks);
    } catch (...) {
    }
    raw->done = true;
  });
  active_[created.run_id] = std::move(active);
  return created.run_id;
}

void ApiServer::routes() {
  auto& srv = impl_->server;

  srv.Post("/api/runs", [this](const httplib::Request& req, httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::exception& e) {
      send_json(res, 400, error_body("invalid_json", e.what()));
      return;
    }
    try {
      send_json(res, 201, {{"run_id", launch(body)}});
    } catch (const frontend::GrammarMismatch& e) {
      Json err = error_body("GrammarMismatch", e.what());
      err["error"]["matched_prefix"] = e.matched_prefix();
      send_json(res, 400, err);
    } catch (const Error& e) {
      const bool client = dynamic_cast<const BadRequest*>(&e) || e.code() == "InvalidConfig";
      send_json(res, client ? 400 : 503, error_body(e.code(), e.what()));
    }
  });

  srv.Get("/api/runs", [this](const httplib::Request&, httplib::Response& res) {
    Json runs = Json::array();
    for (const auto& id : store_.list()) {
      try {
        runs.push_back(summary(store_.snapshot(id)));
      } catch (const std::exception&) {
      }
    }
    send_json(res, 200, {{"runs", runs}});
  });

  srv.Get(R"(/api/runs/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, to_json(store_.snapshot(req.matches[1])));
    } catch (const Error& e) {
      send_json(res, 404, error_body("unknown_run", e.what()));
    }
  });

  srv.Get(R"(/api/runs/([A-Za-z0-9_-]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store_.exists(id)) {
      send_json(res, 404, error_body("unknown_run", "no run " + id));
      return;
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, id](std::size_t, httplib::DataSink& sink) {
      std::int64_t seq = 0;
      bool aborted = false;
      while (!stopping_) {
        for (const auto& e : store_.wait_events(id, seq, std::chrono::milliseconds(200))) {
          const std::string frame = sse_frame(e);
          if (!sink.write(frame.data(), frame.size())) return false;
          seq = e.seq;
          if (e.kind == EventKind::kStateChanged) {
            const auto to = e.payload.value("to", "");
            if (to == "finished") {
              sink.done();
              return true;
            }
            aborted = aborted || to == "aborted";
          }
          if (e.kind == EventKind::kReportReady && aborted) {
            sink.done();
            return true;
          }
        }
        if (!sink.is_writable()) return false;
      }
      sink.done();
      return true;
    });
  });

  srv.Post(R"(/api/runs/([A-Za-z0-9_-]+)/abort)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store_.exists(id)) {
      send_json(res, 404, error_body("unknown_run", "no run " + id));
      return;
    }
    {
      std::lock_guard lock(mu_);
      auto it = active_.find(id);
      if (it != active_.end() && !it->second->done) {
        it->second->abort = true;
        send_json(res, 202, {{"run_id", id}, {"state", "aborting"}});
        return;
      }
    }
    const Run r = store_.snapshot(id);
    send_json(res, 409, error_body(is_terminal(r.state) ? "already_terminal" : "not_running",
                                   "run " + id + " is " + to_string(r.state)));
  });
}

int ApiServer::start(const std::string& host, int port) {
  auto& srv = impl_->server;
  port_ = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw Error("BindFailed", "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  return port_;
}

void ApiServer::listen_blocking(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) throw Error("BindFailed", "cannot bind " + host + ":" + std::to_string(port));
}

void ApiServer::wait_idle() {
  while (true) {
    std::thread t;
    {
      std::lock_guard lock(mu_);
      for (auto& [id, a] : active_)
        if (a->thread.joinable()) {
          t = std::move(a->thread);
          break;
        }
    }
    if (!t.joinable()) return;
    t.join();
  }
}

void ApiServer::stop() {
  stopping_ = true;
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
  {
    std::lock_guard lock(mu_);
    for (auto& [id, a] : active_) a->abort = true;
  }
  wait_idle();
}

}  // namespace matloop::orchestrator
