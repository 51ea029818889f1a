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

#include "vrise/wire.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>

namespace vrise::wire {
namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) |
           (v >> 24);
  }
}

}  // namespace

FdStream::FdStream(int read_fd, int write_fd, int timeout_ms, bool owns_fds)
    : read_fd_(read_fd),
      write_fd_(write_fd),
      timeout_ms_(timeout_ms),
      owns_(owns_fds) {
  struct stat st {};
  is_socket_ = fstat(write_fd_, &st) == 0 && S_ISSOCK(st.st_mode);
}

FdStream::~FdStream() {
  if (owns_) {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  }
  if (child_pid_ > 0) {
    int status = 0;
    ::waitpid(child_pid_, &status, 0);
  }
}

void FdStream::close_write() {
  if (write_fd_ < 0) return;
  if (is_socket_) {
    ::shutdown(write_fd_, SHUT_WR);
  } else if (owns_) {
    ::close(write_fd_);
    write_fd_ = -1;
  }
}

void FdStream::wait_ready(int fd, short events) {
  if (timeout_ms_ <= 0) return;
  pollfd p{fd, events, 0};
  while (true) {
    const int rc = ::poll(&p, 1, timeout_ms_);
    if (rc > 0) return;
    if (rc == 0) throw TimeoutError("scorer stream timed out");
    if (errno != EINTR) {
      throw TransportError(std::string("poll failed: ") + std::strerror(errno));
    }
  }
}

bool FdStream::read_exact(std::span<std::byte> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    wait_ready(read_fd_, POLLIN);
    const ssize_t n = ::read(read_fd_, out.data() + done, out.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (done == 0) return false;
      throw TransportError("stream closed mid-frame");
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

void FdStream::write_all(std::span<const std::byte> data) {
  if (write_fd_ < 0) throw TransportError("write side closed");
  std::size_t done = 0;
  while (done < data.size()) {
    wait_ready(write_fd_, POLLOUT);
    const ssize_t n =
        is_socket_ ? ::send(write_fd_, data.data() + done, data.size() - done,
                            MSG_NOSIGNAL)
                   : ::write(write_fd_, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::pair<std::unique_ptr<FdStream>, std::unique_ptr<FdStream>> stream_pair(
    int timeout_ms) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
    throw TransportError(std::string("socketpair failed: ") +
                         std::strerror(errno));
  }
  return {std::make_unique<FdStream>(fds[0], fds[0], timeout_ms),
          std::make_unique<FdStream>(fds[1], fds[1], timeout_ms)};
}

std::vector<std::byte> encode_header(const nlohmann::json& header) {
  const std::string text = header.dump();
  if (text.size() > kMaxHeaderBytes) throw ProtocolError("header too large");
  const std::uint32_t len = to_le(static_cast<std::uint32_t>(text.size()));
  std::vector<std::byte> out(4 + text.size());
  std::memcpy(out.data(), &len, 4);
  std::memcpy(out.data() + 4, text.data(), text.size());
  return out;
}

void write_frame(ByteStream& stream, const nlohmann::json& header,
                 std::span<const float> payload) {
  std::vector<std::byte> bytes = encode_header(header);
  const std::size_t head = bytes.size();
  bytes.resize(head + payload.size() * sizeof(float));
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(bytes.data() + head, payload.data(),
                payload.size() * sizeof(float));
  } else {
    for (std::size_t i = 0; i < payload.size(); ++i) {
      const std::uint32_t v = to_le(std::bit_cast<std::uint32_t>(payload[i]));
      std::memcpy(bytes.data() + head + 4 * i, &v, 4);
    }
  }
  stream.write_all(bytes);
}

std::optional<nlohmann::json> read_header(ByteStream& stream) {
  std::uint32_t len = 0;
  if (!stream.read_exact(std::as_writable_bytes(std::span(&len, 1)))) {
    return std::nullopt;
  }
  len = to_le(len);
  if (len == 0 || len > kMaxHeaderBytes) {
    throw ProtocolError("invalid header length " + std::to_string(len));
  }
  std::string text(len, '\0');
  if (!stream.read_exact(std::as_writable_bytes(std::span(text)))) {
    throw TransportError("stream closed before header body");
  }
  nlohmann::json header = nlohmann::json::parse(text, nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw ProtocolError("malformed header: not a JSON object");
  }
  return header;
}

std::vector<float> read_payload(ByteStream& stream, std::size_t count) {
  std::vector<float> out(count);
  if (count == 0) return out;
  if (!stream.read_exact(std::as_writable_bytes(std::span(out)))) {
    throw TransportError("stream closed before payload");
  }
  if constexpr (std::endian::native != std::endian::little) {
    for (float& v : out) {
      v = std::bit_cast<float>(to_le(std::bit_cast<std::uint32_t>(v)));
    }
  }
  return out;
}

}  // namespace vrise::wire
