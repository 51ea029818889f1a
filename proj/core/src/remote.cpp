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

#include "vrise/remote.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

namespace vrise::wire {
namespace {

int json_int(const nlohmann::json& header, const char* key) {
  auto it = header.find(key);
  if (it == header.end() || !it->is_number_integer()) {
    throw ProtocolError(std::string("header field '") + key +
                        "' missing or not an integer");
  }
  return it->get<int>();
}

void check_response(const nlohmann::json& header) {
  auto proto = header.find("proto");
  if (proto == header.end() || !proto->is_number_integer()) {
    throw ProtocolError("response without integer 'proto'");
  }
  if (proto->get<int>() != kProtocolVersion) {
    throw VersionMismatchError("peer speaks protocol " +
                               std::to_string(proto->get<int>()) +
                               ", expected " +
                               std::to_string(kProtocolVersion));
  }
  auto err = header.find("error");
  if (err != header.end()) {
    const std::string code = err->is_string() ? err->get<std::string>() : "?";
    const std::string msg = header.value("msg", std::string{});
    if (code == "version") throw VersionMismatchError(msg);
    throw RemoteError(code, msg);
  }
}

void send_error(ByteStream& stream, const std::string& code,
                const std::string& msg) {
  write_frame(stream, {{"proto", kProtocolVersion},
                       {"error", code},
                       {"msg", msg}});
}

std::unique_ptr<ByteStream> connect_tcp(const std::string& host, int port,
                                        int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0) {
    throw TransportError("cannot resolve " + host);
  }
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    throw TransportError("cannot connect to " + host + ":" + service);
  }
  return std::make_unique<FdStream>(fd, fd, timeout_ms);
}

std::unique_ptr<ByteStream> connect_unix(const std::string& path,
                                         int timeout_ms) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    throw TransportError("unix socket path too long");
  }
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError("socket() failed");
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw TransportError("cannot connect to unix:" + path);
  }
  return std::make_unique<FdStream>(fd, fd, timeout_ms);
}

std::unique_ptr<ByteStream> connect_exec(const std::string& command,
                                         int timeout_ms) {
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) throw TransportError("pipe() failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw TransportError("pipe() failed");
  }
  ::signal(SIGPIPE, SIG_IGN);
  const pid_t pid = ::fork();
  if (pid < 0) throw TransportError("fork() failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  auto stream = std::make_unique<FdStream>(from_child[0], to_child[1], timeout_ms);
  stream->set_child(pid);
  return stream;
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  if (text.rfind("exec:", 0) == 0) {
    ep.kind = Kind::kExec;
    ep.path = text.substr(5);
    if (ep.path.empty()) throw std::invalid_argument("exec endpoint without command");
    return ep;
  }
  if (text.rfind("unix:", 0) == 0) {
    ep.kind = Kind::kUnix;
    ep.path = text.substr(5);
    if (ep.path.empty()) throw std::invalid_argument("unix endpoint without path");
    return ep;
  }
  std::string rest = text.rfind("tcp:", 0) == 0 ? text.substr(4) : text;
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw std::invalid_argument("endpoint '" + text + "' is not HOST:PORT");
  }
  ep.kind = Kind::kTcp;
  ep.host = rest.substr(0, colon);
  try {
    std::size_t used = 0;
    ep.port = std::stoi(rest.substr(colon + 1), &used);
    if (used != rest.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw std::invalid_argument("endpoint '" + text + "' has a bad port");
  }
  if (ep.port <= 0 || ep.port > 65535) {
    throw std::invalid_argument("endpoint port out of range");
  }
  return ep;
}

std::string Endpoint::to_string() const {
  switch (kind) {
    case Kind::kTcp:
      return "tcp:" + host + ":" + std::to_string(port);
    case Kind::kUnix:
      return "unix:" + path;
    case Kind::kExec:
      return "exec:" + path;
  }
  return "";
}

std::unique_ptr<ByteStream> connect(const Endpoint& endpoint, int timeout_ms) {
  switch (endpoint.kind) {
    case Endpoint::Kind::kTcp:
      return connect_tcp(endpoint.host, endpoint.port, timeout_ms);
    case Endpoint::Kind::kUnix:
      return connect_unix(endpoint.path, timeout_ms);
    case Endpoint::Kind::kExec:
      return connect_exec(endpoint.path, timeout_ms);
  }
  throw std::invalid_argument("unknown endpoint kind");
}

int handshake(ByteStream& stream) {
  write_frame(stream, {{"proto", kProtocolVersion}, {"op", "hello"}});
  auto header = read_header(stream);
  if (!header) throw TransportError("peer closed during handshake");
  check_response(*header);
  const int classes = json_int(*header, "classes");
  if (classes < 1) throw ProtocolError("handshake reported no classes");
  return classes;
}

RemoteScorer::RemoteScorer(const Endpoint& endpoint, RemoteOptions options)
    : RemoteScorer(
          [endpoint, timeout = options.timeout_ms] {
            return connect(endpoint, timeout);
          },
          options) {}

RemoteScorer::RemoteScorer(Connector connector, RemoteOptions options)
    : connector_(std::move(connector)), options_(options) {
  std::lock_guard<std::mutex> lock(mutex_);
  ensure_connected();
}

int RemoteScorer::num_classes() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return classes_;
}

void RemoteScorer::ensure_connected() {
  if (stream_) return;
  auto stream = connector_();
  const int classes = handshake(*stream);
  if (classes_ >= 0 && classes != classes_) {
    throw ProtocolError("class count changed from " + std::to_string(classes_) +
                        " to " + std::to_string(classes) + " on reconnect");
  }
  classes_ = classes;
  stream_ = std::move(stream);
}

std::vector<ConfidenceVector> RemoteScorer::attempt(
    std::span<const Image> images, Precision precision) {
  ensure_connected();
  const Image& first = images.front();
  nlohmann::json header = {{"proto", kProtocolVersion},
                           {"op", "score"},
                           {"batch", images.size()},
                           {"h", first.height()},
                           {"w", first.width()},
                           {"c", first.channels()},
                           {"dtype", "f32"}};
  if (precision == Precision::kFp16) header["precision"] = "fp16";

  std::vector<float> payload;
  payload.reserve(images.size() * first.size());
  for (const Image& im : images) {
    payload.insert(payload.end(), im.data().begin(), im.data().end());
  }
  write_frame(*stream_, header, payload);

  auto response = read_header(*stream_);
  if (!response) throw TransportError("peer closed before responding");
  check_response(*response);
  const int classes = json_int(*response, "classes");
  if (classes != classes_) {
    throw ProtocolError("class count changed mid-session: " +
                        std::to_string(classes) + " != " +
                        std::to_string(classes_));
  }
  const std::vector<float> scores =
      read_payload(*stream_, images.size() * static_cast<std::size_t>(classes));
  std::vector<ConfidenceVector> out(images.size());
  for (std::size_t b = 0; b < images.size(); ++b) {
    out[b].assign(scores.begin() + static_cast<std::ptrdiff_t>(b * classes),
                  scores.begin() + static_cast<std::ptrdiff_t>((b + 1) * classes));
    for (float v : out[b]) {
      if (!std::isfinite(v)) throw ProtocolError("non-finite score in response");
    }
  }
  return out;
}

std::vector<ConfidenceVector> RemoteScorer::score_batch(
    std::span<const Image> images, Precision precision) {
  validate_batch(images);
  std::lock_guard<std::mutex> lock(mutex_);
  for (int attempt_no = 0;; ++attempt_no) {
    try {
      return attempt(images, precision);
    } catch (const TransportError&) {
      stream_.reset();
      if (attempt_no >= options_.retries) throw;
    } catch (const RemoteError&) {
      // Error responses leave the stream aligned on a frame boundary.
      throw;
    } catch (...) {
      stream_.reset();
      throw;
    }
  }
}

void serve_stream(ByteStream& stream, Scorer& scorer) {
  while (true) {
    std::optional<nlohmann::json> header;
    try {
      header = read_header(stream);
    } catch (const ProtocolError& e) {
      send_error(stream, "bad_request", e.what());
      return;
    }
    if (!header) return;

    auto proto = header->find("proto");
    if (proto == header->end() || !proto->is_number_integer()) {
      send_error(stream, "bad_request", "missing integer 'proto'");
      return;
    }
    if (proto->get<int>() != kProtocolVersion) {
      send_error(stream, "version",
                 "server speaks protocol " + std::to_string(kProtocolVersion));
      return;
    }
    const std::string op = header->value("op", std::string{});
    if (op == "hello") {
      write_frame(stream, {{"proto", kProtocolVersion},
                           {"classes", scorer.num_classes()}});
      continue;
    }
    if (op != "score") {
      send_error(stream, "unknown_op", "unsupported op '" + op + "'");
      return;
    }

    int batch = 0, h = 0, w = 0, c = 0;
    try {
      batch = json_int(*header, "batch");
      h = json_int(*header, "h");
      w = json_int(*header, "w");
      c = json_int(*header, "c");
    } catch (const ProtocolError& e) {
      send_error(stream, "bad_request", e.what());
      return;
    }
    if (header->value("dtype", std::string{}) != "f32") {
      send_error(stream, "bad_request", "dtype must be f32");
      return;
    }
    if (batch < 1 || h < 1 || w < 1 || c < 1 ||
        static_cast<std::uint64_t>(batch) * h * w * c > kMaxPayloadFloats) {
      send_error(stream, "bad_request", "invalid tensor shape");
      return;
    }
    const Precision precision =
        header->value("precision", std::string{"fp32"}) == "fp16"
            ? Precision::kFp16
            : Precision::kFp32;

    std::vector<float> payload = read_payload(
        stream, static_cast<std::size_t>(batch) * h * w * c);
    std::vector<Image> images;
    images.reserve(batch);
    const std::size_t per_image = static_cast<std::size_t>(h) * w * c;
    for (int b = 0; b < batch; ++b) {
      Image im(h, w, c);
      std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(b * per_image),
                  per_image, im.data().begin());
      images.push_back(std::move(im));
    }

    std::vector<ConfidenceVector> scores;
    try {
      scores = scorer.score_batch(images, precision);
    } catch (const std::invalid_argument& e) {
      send_error(stream, "bad_shape", e.what());
      continue;
    } catch (const std::exception& e) {
      send_error(stream, "scorer_failure", e.what());
      continue;
    }
    std::vector<float> flat;
    flat.reserve(scores.size() * scorer.num_classes());
    for (const auto& v : scores) flat.insert(flat.end(), v.begin(), v.end());
    write_frame(stream,
                {{"proto", kProtocolVersion}, {"classes", scorer.num_classes()}},
                flat);
  }
}

TcpServer::TcpServer(Scorer& scorer, int port, const std::string& bind_host)
    : scorer_(scorer) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError("socket() failed");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::invalid_argument("bad bind address " + bind_host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 8) != 0) {
    ::close(listen_fd_);
    throw TransportError(std::string("cannot listen: ") + std::strerror(errno));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::stop() { stopping_ = true; }

void TcpServer::run(std::size_t max_connections) {
  std::size_t served = 0;
  while (!stopping_ && (max_connections == 0 || served < max_connections)) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, 100);
    if (rc <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    FdStream stream(fd, fd, 0);
    try {
      serve_stream(stream, scorer_);
    } catch (const std::exception&) {
      // Session failed; keep serving others.
    }
    ++served;
  }
}

}  // namespace vrise::wire
