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

#ifndef MATLOOP_JSON_UTIL_HPP_
#define MATLOOP_JSON_UTIL_HPP_

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"

namespace matloop {

using Json = nlohmann::json;

// Canonical encoding: sorted keys (nlohmann objects are std::map backed),
// no insignificant whitespace, shortest round-trip doubles.
inline std::string canonical_dump(const Json& j) { return j.dump(); }

// Canonical file form adds a single trailing LF.
inline std::string canonical_file(const Json& j) { return j.dump() + "\n"; }

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Recursively drops every object member whose key is in `keys`. Used to
// compare payloads modulo wall times and server-side identifiers.
inline Json strip_keys(Json j, std::initializer_list<std::string_view> keys) {
  if (j.is_object()) {
    for (auto k : keys) j.erase(std::string(k));
    for (auto it = j.begin(); it != j.end(); ++it) *it = strip_keys(std::move(*it), keys);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_keys(std::move(v), keys);
  }
  return j;
}

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace matloop

#endif  // MATLOOP_JSON_UTIL_HPP_
