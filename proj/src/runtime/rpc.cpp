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

#include "senseplane/runtime/rpc.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>
#include <vector>

#include "json.hpp"
#include "senseplane/error.hpp"

namespace senseplane::runtime {
namespace {

using nlohmann::json;

sockaddr_un make_address(const std::filesystem::path& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  const std::string s = path.string();
  if (s.size() >= sizeof(addr.sun_path)) fail(ErrorCode::kInvalidArgument, "socket path too long");
  std::memcpy(addr.sun_path, s.c_str(), s.size() + 1);
  return addr;
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

// Reads up to the next newline; false on EOF with nothing buffered.
bool read_line(int fd, std::string& buffer, std::string& line) {
  for (;;) {
    const auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      return true;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      if (buffer.empty()) return false;
      line = std::move(buffer);
      buffer.clear();
      return true;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

codec::CodeSequence codes_from(const json& j) {
  codec::CodeSequence seq;
  seq.window_id = j.value("window_id", std::string());
  seq.codes = j.at("codes").get<std::vector<std::uint32_t>>();
  seq.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
  seq.site_id = j.value("site_id", std::string());
  seq.confidence = j.value("confidence", 1.0);
  seq.modality_presence = j.value("modality_presence", std::vector<bool>{});
  return seq;
}

codec::RawWindowRecord raw_from(const json& j) {
  codec::RawWindowRecord raw;
  raw.window_id = j.value("window_id", std::string());
  raw.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
  raw.steps = j.at("steps").get<std::size_t>();
  raw.modalities = j.at("modalities").get<std::size_t>();
  raw.channels_per_modality = j.at("channels_per_modality").get<std::size_t>();
  raw.values = j.at("values").get<std::vector<double>>();
  raw.modality_mask = j.at("modality_mask").get<std::vector<bool>>();
  raw.site_id = j.value("site_id", std::string());
  return raw;
}

json cost_json(const decision::CostVector& c) {
  return {{"lat_ms", c.lat_ms}, {"energy_j", c.energy_j}, {"tokens", c.tokens},
          {"risk", c.risk},     {"total", c.total}};
}

}  // namespace

std::string RpcHandler::handle(std::string_view line) {
  json reply;
  try {
    const json req = json::parse(line);
    const std::string method = req.at("method").get<std::string>();
    std::lock_guard lock(mu_);
    if (method == "Encode") {
      const auto enc = pipeline_.encode(raw_from(req));
      reply = {{"ok", true},
               {"window_id", enc.codes.window_id},
               {"codes", enc.codes.codes},
               {"confidence", enc.codes.confidence}};
    } else if (method == "Retrieve") {
      bool hit = false;
      const auto result = pipeline_.retrieve(codes_from(req), req.value("query", std::string()), &hit);
      std::vector<std::string> ids;
      for (const auto& s : result) ids.push_back(s.snippet.doc_id);
      reply = {{"ok", true}, {"doc_ids", ids}, {"cache_hit", hit}};
    } else if (method == "RouteAndGenerate") {
      DecisionInput in;
      in.decision_id = req.value("window_id", std::string("rpc-") + std::to_string(calls_));
      in.stream_id = req.value("stream_id", std::string("rpc"));
      in.arrival_ms = req.value("arrival_ms", std::int64_t{0});
      if (req.contains("codes")) {
        in.codes = codes_from(req);
      } else {
        in.raw = raw_from(req);
      }
      in.sensory_passes = req.at("sensory_passes").get<std::vector<std::vector<double>>>();
      in.language_posterior = req.at("language_posterior").get<std::vector<double>>();
      in.note = req.value("note", std::string());
      in.query_text = req.value("query", std::string());
      in.task = codec::task_from_string(req.value("task", std::string("explain")));
      if (req.contains("action")) in.forced = decision::action_from_string(req.at("action").get<std::string>());
      const DecisionOutcome out = pipeline_.decide(in, derive_seed(pipeline_.config().seed, calls_));
      reply = {{"ok", true},
               {"window_id", out.decision_id},
               {"action", decision::to_string(out.action)},
               {"text", out.text},
               {"u", out.u.fused},
               {"cost", cost_json(out.cost)},
               {"doc_ids", out.doc_ids},
               {"audit_id", out.audit_seq}};
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown method " + method);
    }
    ++calls_;
  } catch (const std::exception& e) {
    reply = {{"ok", false}, {"error", e.what()}};
  }
  return reply.dump();
}

void serve_unix(const std::filesystem::path& socket_path, RpcHandler& handler,
                const std::atomic<bool>& stop) {
  const int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listener < 0) fail(ErrorCode::kIoError, "socket() failed");
  std::filesystem::remove(socket_path);
  const sockaddr_un addr = make_address(socket_path);
  if (::bind(listener, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listener, 16) != 0) {
    ::close(listener);
    fail(ErrorCode::kIoError, "cannot listen on " + socket_path.string());
  }
  std::vector<std::thread> workers;
  while (!stop.load()) {
    pollfd p{listener, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    workers.emplace_back([fd, &handler, &stop] {
      std::string buffer;
      std::string line;
      while (!stop.load()) {
        pollfd q{fd, POLLIN, 0};
        if (buffer.find('\n') == std::string::npos && ::poll(&q, 1, 100) <= 0) continue;
        if (!read_line(fd, buffer, line)) break;
        if (line.empty()) continue;
        if (!write_all(fd, handler.handle(line) + "\n")) break;
      }
      ::close(fd);
    });
  }
  for (auto& w : workers) w.join();
  ::close(listener);
  std::filesystem::remove(socket_path);
}

RpcClient::RpcClient(const std::filesystem::path& socket_path) {
  fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd_ < 0) fail(ErrorCode::kIoError, "socket() failed");
  const sockaddr_un addr = make_address(socket_path);
  if (::connect(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd_);
    fd_ = -1;
    fail(ErrorCode::kIoError, "cannot connect to " + socket_path.string());
  }
}

RpcClient::~RpcClient() {
  if (fd_ >= 0) ::close(fd_);
}

std::string RpcClient::call(std::string_view request_line) {
  std::string msg(request_line);
  msg += '\n';
  if (!write_all(fd_, msg)) fail(ErrorCode::kIoError, "rpc send failed");
  std::string line;
  if (!read_line(fd_, buffer_, line)) fail(ErrorCode::kIoError, "rpc connection closed");
  return line;
}

}  // namespace senseplane::runtime
