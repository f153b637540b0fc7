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

#include "matloop/run_store.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include "matloop/error.hpp"

namespace matloop::orchestrator {

namespace fs = std::filesystem;

namespace {

void append_line(const fs::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw Error("StoreError", "cannot open " + path.string());
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      ::close(fd);
      throw Error("StoreError", "write failed on " + path.string());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

bool valid_run_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
}

}  // namespace

RunStore::RunStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

bool RunStore::exists(const std::string& run_id) const {
  return valid_run_id(run_id) && fs::exists(dir(run_id) / "events.jsonl");
}

std::vector<std::string> RunStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_))
    if (entry.is_directory() && fs::exists(entry.path() / "events.jsonl")) ids.push_back(entry.path().filename());
  std::sort(ids.begin(), ids.end());
  return ids;
}

void RunStore::create(const std::string& run_id) {
  if (!valid_run_id(run_id)) throw Error("InvalidRunId", "bad run id '" + run_id + "'");
  if (!fs::create_directories(dir(run_id)) && fs::exists(dir(run_id) / "events.jsonl"))
    throw Error("RunExists", "run " + run_id + " already exists");
  std::ofstream(dir(run_id) / "events.jsonl", std::ios::app);
}

void RunStore::append(const Run& after, const RunEvent& event) {
  {
    std::lock_guard lock(mu_);
    append_line(dir(after.run_id) / "events.jsonl", canonical_file(to_json(event)));
    write_file_atomic((dir(after.run_id) / "run.json").string(), canonical_file(to_json(after)));
  }
  cv_.notify_all();
}

std::vector<RunEvent> RunStore::events(const std::string& run_id, std::int64_t after_seq) const {
  if (!exists(run_id)) throw Error("UnknownRun", "no run " + run_id);
  std::string text = read_file((dir(run_id) / "events.jsonl").string());
  std::vector<RunEvent> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // an unterminated tail is an interrupted write
    const std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    RunEvent e = event_from_json(Json::parse(line));
    if (e.seq > after_seq) out.push_back(std::move(e));
  }
  return out;
}

Run RunStore::snapshot(const std::string& run_id) const {
  if (!exists(run_id)) throw Error("UnknownRun", "no run " + run_id);
  const auto path = dir(run_id) / "run.json";
  if (!fs::exists(path)) return rebuild(run_id);
  return run_from_json(Json::parse(read_file(path.string())));
}

Run RunStore::rebuild(const std::string& run_id) const { return replay(events(run_id)); }

std::vector<RunEvent> RunStore::wait_events(const std::string& run_id, std::int64_t after_seq,
                                            std::chrono::milliseconds timeout) const {
  auto out = events(run_id, after_seq);
  if (!out.empty()) return out;
  {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout);
  }
  return events(run_id, after_seq);
}

std::string new_run_id() {
  static std::atomic<std::uint64_t> counter{0};
  std::random_device rd;
  const std::uint64_t v = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ (now_epoch_ms() << 8) ^ ++counter;
  return "run-" + hex16(v);
}

}  // namespace matloop::orchestrator
