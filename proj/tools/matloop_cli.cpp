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

// matloop command-line entry point.
//   exit 0: success; 1: validation failure; 2: infrastructure error

#include <csignal>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "matloop/api_server.hpp"
#include "matloop/benchmark.hpp"
#include "matloop/compute.hpp"
#include "matloop/error.hpp"
#include "matloop/orchestrator.hpp"
#include "matloop/report.hpp"
#include "matloop/schema.hpp"

namespace {

using namespace matloop;
using namespace matloop::orchestrator;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kInfra = 2;

RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    return run_config_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw Error("InvalidConfig", path + ": " + e.what());
  }
}

int cmd_run(const std::string& text, const std::string& config_path, const std::string& strategy,
            const std::string& agents, int trials, const std::string& out) {
  RunConfig config = load_config(config_path);
  if (!strategy.empty()) config.strategy = discussion::strategy_from_string(strategy);
  if (!agents.empty()) {
    if (agents != "scripted" && agents != "llm") throw Error("InvalidConfig", "--agents must be scripted or llm");
    if (agents == "llm" && !config.llm) throw Error("InvalidConfig", "--agents llm needs agents.llm in --config");
    config.agent_mode = agents;
  }
  if (trials > 0) config.n_trials = trials;

  RunStore store(out);
  Hypothesis h;
  h.text = text;
  const Run run = execute_run(h, config, store);
  const std::string md = render_report(*run.report);
  write_file_atomic((store.dir(run.run_id) / "report.json").string(), canonical_file(*run.report));
  write_file_atomic((store.dir(run.run_id) / "report.md").string(), md);
  std::cout << md << "\nrun " << run.run_id << " stored in " << store.dir(run.run_id).string() << "\n";
  if (run.state == RunState::kAborted) {
    const std::string code = run.abort_code.value_or("");
    std::cerr << "run aborted: " << code << "\n";
    return is_validation_abort(code) ? kInvalid : kInfra;
  }
  return kOk;
}

int cmd_serve(int port, const std::string& static_dir, const std::string& config_path, const std::string& out) {
  RunStore store(out);
  ApiServer server(store, load_config(config_path));
  if (!static_dir.empty()) server.set_static_dir(static_dir);
  std::cerr << "serving on 0.0.0.0:" << port << "\n";
  server.listen_blocking("0.0.0.0", port);
  return kOk;
}

int cmd_compute_serve(int port, int workers) {
  compute::JobServer server(workers);
  std::cerr << "compute server on 0.0.0.0:" << port << " with " << workers << " workers\n";
  server.listen_blocking("0.0.0.0", port);
  return kOk;
}

int cmd_bench(const std::string& file, const std::string& report, const std::string& config_path,
              const std::string& out) {
  const auto cases = load_benchmark(file);
  RunStore store(out);
  const auto result = run_benchmark(cases, load_config(config_path), store);
  const Json doc = to_json(result);
  if (!report.empty()) write_file_atomic(report, canonical_file(doc));
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

int cmd_validate(const std::string& file) {
  Json doc;
  try {
    doc = Json::parse(read_file(file));
  } catch (const Json::exception& e) {
    std::cerr << file << ": not JSON: " << e.what() << "\n";
    return kInvalid;
  }
  const auto diags = validate_spec(doc);
  for (const auto& d : diags) std::cout << d.path << " [" << d.rule << "] " << d.message << "\n";
  if (diags.empty()) std::cout << "ok\n";
  return diags.empty() ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  CLI::App app{"matloop: closed-loop hypothesis validation over in-silico experiments"};
  app.require_subcommand(1);

  std::string text, config_path, strategy, agents, out = "runs", static_dir, file, report;
  int trials = 0, port = 8080, workers = compute::kDefaultWorkers;

  auto* run = app.add_subcommand("run", "validate one hypothesis");
  run->add_option("--hypothesis", text, "hypothesis text")->required();
  run->add_option("--strategy", strategy, "adversarial | voting");
  run->add_option("--agents", agents, "scripted | llm");
  run->add_option("--trials", trials, "trials per material")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "run store directory");
  run->add_option("--config", config_path, "config JSON file");

  auto* serve = app.add_subcommand("serve", "serve the HTTP API");
  serve->add_option("--port", port)->required();
  serve->add_option("--static", static_dir, "directory of UI files");
  serve->add_option("--out", out, "run store directory");
  serve->add_option("--config", config_path, "default config JSON file");

  auto* cserve = app.add_subcommand("compute-serve", "serve the compute job protocol");
  cserve->add_option("--port", port)->required();
  cserve->add_option("--workers", workers)->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "run a benchmark file");
  bench->add_option("--file", file)->required();
  bench->add_option("--report", report, "write the result JSON here");
  bench->add_option("--out", out, "run store directory");
  bench->add_option("--config", config_path, "config JSON file");

  auto* validate = app.add_subcommand("validate-spec", "check an experiment spec document");
  validate->add_option("--file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(text, config_path, strategy, agents, trials, out);
    if (*serve) return cmd_serve(port, static_dir, config_path, out);
    if (*cserve) return cmd_compute_serve(port, workers);
    if (*bench) return cmd_bench(file, report, config_path, out);
    if (*validate) return cmd_validate(file);
  } catch (const Error& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    const bool invalid = is_validation_abort(e.code()) || e.code() == "InvalidBenchmark" ||
                         e.code() == "EmptyBenchmark" || e.code() == "InvalidStrategy";
    return invalid ? kInvalid : kInfra;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfra;
  }
  return kOk;
}
