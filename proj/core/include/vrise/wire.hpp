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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrise/classifier.hpp"

// Scorer wire protocol, version 1.
//
// Every message is a frame: a little-endian u32 byte count, a UTF-8 JSON
// header of that many bytes, then an optional raw little-endian float32
// payload whose length follows from the header:
//
//   hello request   {"proto":1,"op":"hello"}                       no payload
//   hello response  {"proto":1,"classes":K}                        no payload
//   score request   {"proto":1,"op":"score","batch":B,"h":H,"w":W,"c":C,
//                    "dtype":"f32"[,"precision":"fp16"]}     B*H*W*C floats
//   score response  {"proto":1,"classes":K}                    B*K floats
//   error response  {"proto":1,"error":"<code>","msg":"..."}      no payload
namespace vrise::wire {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxHeaderBytes = 1u << 20;
inline constexpr std::uint64_t kMaxPayloadFloats = 1ull << 30;

class TransportError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

class ProtocolError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class VersionMismatchError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// The peer answered with an error response.
class RemoteError : public ScorerError {
 public:
  RemoteError(std::string code, const std::string& message)
      : ScorerError("remote error [" + code + "]: " + message),
        code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class ByteStream {
 public:
  virtual ~ByteStream() = default;
  // Reads exactly out.size() bytes. Returns false only on end-of-stream
  // before the first byte; a partial read throws TransportError.
  virtual bool read_exact(std::span<std::byte> out) = 0;
  virtual void write_all(std::span<const std::byte> data) = 0;
};

// Stream over a pair of file descriptors (a socket uses the same fd twice).
// timeout_ms <= 0 waits forever.
class FdStream : public ByteStream {
 public:
  FdStream(int read_fd, int write_fd, int timeout_ms, bool owns_fds = true);
  ~FdStream() override;
  FdStream(const FdStream&) = delete;
  FdStream& operator=(const FdStream&) = delete;

  bool read_exact(std::span<std::byte> out) override;
  void write_all(std::span<const std::byte> data) override;

  // Half-closes the write side (sockets) or closes the write fd (pipes).
  void close_write();
  // Child process to reap on destruction (exec endpoints).
  void set_child(int pid) { child_pid_ = pid; }

 private:
  void wait_ready(int fd, short events);

  int read_fd_;
  int write_fd_;
  int timeout_ms_;
  bool owns_;
  bool is_socket_;
  int child_pid_ = -1;
};

// A connected pair of in-process streams (socketpair), for tests and
// in-process servers.
std::pair<std::unique_ptr<FdStream>, std::unique_ptr<FdStream>> stream_pair(
    int timeout_ms = 0);

void write_frame(ByteStream& stream, const nlohmann::json& header,
                 std::span<const float> payload = {});
// nullopt on a clean end-of-stream. Throws ProtocolError for an oversized or
// unparseable header.
std::optional<nlohmann::json> read_header(ByteStream& stream);
std::vector<float> read_payload(ByteStream& stream, std::size_t count);

// Raw frame bytes for a header; exposed for protocol tests.
std::vector<std::byte> encode_header(const nlohmann::json& header);

}  // namespace vrise::wire
