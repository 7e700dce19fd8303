// Copyright 2026 The Senseplane Authors
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

#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <string>

#include "senseplane/runtime/pipeline.hpp"

namespace senseplane::runtime {

// Line-delimited JSON over a Unix stream socket. Each request line is an
// object with a "method" of Encode, Retrieve or RouteAndGenerate; each reply
// line is an object with "ok" and either the result fields or "error".
//
//   Encode            {window_id, timestamp_ms, steps, modalities,
//                      channels_per_modality, values, modality_mask, site_id}
//                  -> {window_id, codes, confidence}
//   Retrieve          {codes, query} -> {doc_ids}
//   RouteAndGenerate  {window_id, codes | raw fields, sensory_passes,
//                      language_posterior, note, query, task, stream_id,
//                      arrival_ms, action?}
//                  -> {window_id, action, text, u, cost, doc_ids, audit_id}
class RpcHandler {
 public:
  explicit RpcHandler(Pipeline& pipeline) : pipeline_(pipeline) {}

  // One request line to one reply line; never throws.
  std::string handle(std::string_view line);

 private:
  Pipeline& pipeline_;
  std::mutex mu_;
  std::uint64_t calls_ = 0;
};

// Serves until `stop` becomes true. One thread per connection; the handler
// serializes pipeline access.
void serve_unix(const std::filesystem::path& socket_path, RpcHandler& handler,
                const std::atomic<bool>& stop);

class RpcClient {
 public:
  explicit RpcClient(const std::filesystem::path& socket_path);
  ~RpcClient();
  RpcClient(const RpcClient&) = delete;
  RpcClient& operator=(const RpcClient&) = delete;

  // Sends one line and returns the reply line (without the newline).
  std::string call(std::string_view request_line);

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace senseplane::runtime
