/*
 * Copyright 2026 The vrise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "vrise/classifier.hpp"
#include "vrise/wire.hpp"

namespace vrise::wire {

// Where a scorer lives:
//   "tcp:HOST:PORT" or "HOST:PORT"   TCP socket
//   "unix:/path/to/socket"          Unix domain socket
//   "exec:COMMAND"                  child process speaking on stdin/stdout
struct Endpoint {
  enum class Kind { kTcp, kUnix, kExec };
  Kind kind = Kind::kTcp;
  std::string host;
  int port = 0;
  std::string path;  // unix socket path or exec command

  static Endpoint parse(const std::string& text);
  std::string to_string() const;
};

std::unique_ptr<ByteStream> connect(const Endpoint& endpoint, int timeout_ms);

struct RemoteOptions {
  int timeout_ms = 60000;
  // Extra attempts after a transport failure. Scoring is pure, so a
  // re-sent request is safe.
  int retries = 2;
};

// Scorer client for the v1 protocol. Calls are serialized on one
// connection; a protocol violation drops the connection so the next call
// starts from a fresh handshake.
class RemoteScorer final : public Scorer {
 public:
  using Connector = std::function<std::unique_ptr<ByteStream>()>;

  RemoteScorer(const Endpoint& endpoint, RemoteOptions options = {});
  explicit RemoteScorer(Connector connector, RemoteOptions options = {});

  int num_classes() const override;
  std::vector<ConfidenceVector> score_batch(std::span<const Image> images,
                                            Precision precision) override;
  using Scorer::score_batch;

 private:
  void ensure_connected();
  std::vector<ConfidenceVector> attempt(std::span<const Image> images,
                                        Precision precision);

  Connector connector_;
  RemoteOptions options_;
  mutable std::mutex mutex_;
  std::unique_ptr<ByteStream> stream_;
  int classes_ = -1;
};

// Performs the hello exchange and returns the class count.
int handshake(ByteStream& stream);

// Answers requests on `stream` until the peer closes it. Malformed frames
// get an error response and end the session, since the payload boundary is
// unknown; scorer failures get an error response and the session goes on.
void serve_stream(ByteStream& stream, Scorer& scorer);

// Accepts TCP connections on 127.0.0.1:port (0 = ephemeral) and serves
// each one sequentially.
class TcpServer {
 public:
  TcpServer(Scorer& scorer, int port, const std::string& bind_host = "127.0.0.1");
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  int port() const { return port_; }
  // Serves until stop() is called or max_connections have been handled
  // (0 = unlimited).
  void run(std::size_t max_connections = 0);
  void stop();

 private:
  Scorer& scorer_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
};

}  // namespace vrise::wire
