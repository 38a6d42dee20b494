#include "cfrit/wire.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "cfrit/error.hpp"
#include "cfrit/random.hpp"

namespace cfrit::wire {

namespace {

ProtocolError bad_frame(const std::string& what) { return ProtocolError("bad_frame", what); }

std::string errno_text() { return std::strerror(errno); }

void send_all(int fd, const char* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw TimeoutError("send timed out");
      throw NetworkError("send failed: " + errno_text());
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

// Returns bytes read; fewer than `size` only on EOF.
std::size_t recv_all(int fd, char* data, std::size_t size) {
  std::size_t got = 0;
  while (got < size) {
    const ssize_t n = ::recv(fd, data + got, size - got, 0);
    if (n == 0) break;
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw TimeoutError("receive timed out");
      throw NetworkError("receive failed: " + errno_text());
    }
    got += static_cast<std::size_t>(n);
  }
  return got;
}

void set_timeouts(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

std::string new_request_id() {
  SystemRandom rng;
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << rng.next_u64();
  return out.str();
}

}  // namespace

std::string type_name(MessageType t) {
  switch (t) {
    case MessageType::TuneRequest: return "TuneRequest";
    case MessageType::TuneResponse: return "TuneResponse";
    case MessageType::Error: return "Error";
    case MessageType::Ping: return "Ping";
    case MessageType::Pong: return "Pong";
  }
  return "Error";
}

MessageType type_from_name(const std::string& name) {
  for (auto t : {MessageType::TuneRequest, MessageType::TuneResponse, MessageType::Error,
                 MessageType::Ping, MessageType::Pong})
    if (type_name(t) == name) return t;
  throw bad_frame("unknown message type '" + name + "'");
}

Json message_to_json(const Message& m) {
  Json j{{"type", type_name(m.type)}, {"request_id", m.request_id}, {"payload", m.payload}};
  if (m.server_seconds) j["server_seconds"] = *m.server_seconds;
  return j;
}

Message message_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j.contains("request_id") || !j["type"].is_string() ||
      !j["request_id"].is_string())
    throw bad_frame("message lacks a type or request_id");
  Message m;
  m.type = type_from_name(j["type"].get<std::string>());
  m.request_id = j["request_id"].get<std::string>();
  if (j.contains("payload")) m.payload = j["payload"];
  if (j.contains("server_seconds") && j["server_seconds"].is_number())
    m.server_seconds = j["server_seconds"].get<double>();
  return m;
}

Message error_message(const std::string& request_id, const std::string& code, const std::string& detail) {
  Message m;
  m.type = MessageType::Error;
  m.request_id = request_id;
  m.payload = Json{{"code", code}, {"detail", detail}};
  return m;
}

std::string encode_frame(const std::string& body) {
  if (body.size() > 0xffffffffu) throw ProtocolError("frame_too_large", "frame body exceeds 4 GiB");
  const auto len = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((len >> shift) & 0xff));
  out += body;
  return out;
}

void write_frame(int fd, const std::string& body, std::size_t max_frame) {
  if (body.size() > max_frame)
    throw ProtocolError("frame_too_large", "frame of " + std::to_string(body.size()) +
                                               " bytes exceeds the limit of " + std::to_string(max_frame));
  const std::string frame = encode_frame(body);
  send_all(fd, frame.data(), frame.size());
}

std::optional<std::string> read_frame(int fd, std::size_t max_frame) {
  unsigned char header[4];
  const std::size_t got = recv_all(fd, reinterpret_cast<char*>(header), 4);
  if (got == 0) return std::nullopt;
  if (got < 4) throw bad_frame("connection closed inside a frame header");
  const std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (len > max_frame)
    throw ProtocolError("frame_too_large", "frame of " + std::to_string(len) +
                                               " bytes exceeds the limit of " + std::to_string(max_frame));
  std::string body(len, '\0');
  if (recv_all(fd, body.data(), len) < len) throw bad_frame("connection closed inside a frame body");
  return body;
}

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = o.release();
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

Socket connect_to(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw NetworkError("cannot resolve '" + host + "': " + gai_strerror(rc));
  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s) continue;
    const int flags = ::fcntl(s.fd(), F_GETFL, 0);
    ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(s.fd(), ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      pollfd pfd{s.fd(), POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (rc == 0) {
        ::freeaddrinfo(res);
        throw TimeoutError("connect to " + host + ":" + service + " timed out");
      }
      int err = 0;
      socklen_t len = sizeof(err);
      ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
      rc = err == 0 ? 0 : -1;
      errno = err;
    }
    if (rc == 0) {
      ::fcntl(s.fd(), F_SETFL, flags);
      set_timeouts(s.fd(), timeout);
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      ::freeaddrinfo(res);
      return s;
    }
    last_error = errno_text();
  }
  ::freeaddrinfo(res);
  throw NetworkError("cannot connect to " + host + ":" + service + ": " + last_error);
}

Socket listen_on(const std::string& bind_address, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(bind_address.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw NetworkError("cannot resolve '" + bind_address + "': " + gai_strerror(rc));
  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s) continue;
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(s.fd(), 16) == 0) {
      ::freeaddrinfo(res);
      return s;
    }
    last_error = errno_text();
  }
  ::freeaddrinfo(res);
  throw NetworkError("cannot listen on " + bind_address + ":" + service + ": " + last_error);
}

std::uint16_t local_port(const Socket& s) {
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0)
    throw NetworkError("getsockname failed: " + errno_text());
  if (addr.ss_family == AF_INET6) return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

TuneServer::TuneServer(ServerOptions options) : options_(std::move(options)) {}

TuneServer::~TuneServer() { stop(); }

void TuneServer::start() {
  if (running_) return;
  listener_ = listen_on(options_.bind_address, options_.port);
  port_ = local_port(listener_);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void TuneServer::stop() {
  if (running_.exchange(false)) ::shutdown(listener_.fd(), SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers)
    if (t.joinable()) t.join();
  listener_ = Socket();
}

void TuneServer::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void TuneServer::accept_loop() {
  while (running_) {
    const int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      if (!running_) break;
      continue;
    }
    std::lock_guard<std::mutex> lock(mutex_);
    if (!running_) {
      ::close(fd);
      break;
    }
    open_fds_.insert(fd);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TuneServer::serve_connection(int fd) {
  Socket socket(fd);
  for (;;) {
    Message reply;
    bool close_after = false;
    try {
      const auto body = read_frame(fd, options_.max_frame);
      if (!body) break;
      Json doc;
      try {
        doc = Json::parse(*body);
      } catch (const Json::exception& e) {
        throw bad_frame(std::string("frame body is not JSON: ") + e.what());
      }
      reply = handle(message_from_json(doc));
    } catch (const TimeoutError&) {
      break;
    } catch (const NetworkError&) {
      break;
    } catch (const Error& e) {
      reply = error_message("", e.code(), e.what());
      close_after = true;
    }
    try {
      write_frame(fd, message_to_json(reply).dump(), options_.max_frame);
    } catch (const ProtocolError& e) {
      // The result itself is too large for a frame; report that instead.
      try {
        write_frame(fd, message_to_json(error_message(reply.request_id, e.code(), e.what())).dump(),
                    options_.max_frame);
      } catch (const Error&) {
        break;
      }
    } catch (const Error&) {
      break;
    }
    if (close_after) break;
  }
  std::lock_guard<std::mutex> lock(mutex_);
  open_fds_.erase(fd);
}

Message TuneServer::handle(const Message& request) const {
  switch (request.type) {
    case MessageType::Ping: {
      Message pong;
      pong.type = MessageType::Pong;
      pong.request_id = request.request_id;
      return pong;
    }
    case MessageType::TuneRequest: {
      try {
        const Json& payload = request.payload;
        if (!payload.is_object() || !payload.contains("scheme") || !payload["scheme"].is_string())
          return error_message(request.request_id, "bad_payload", "TuneRequest payload has no scheme");
        const auto scheme = payload["scheme"].get<std::string>();
        if (!options_.schemes.count(scheme))
          return error_message(request.request_id, "unsupported_scheme",
                               "this server does not handle scheme '" + scheme + "'");
        // Secret-key material never belongs on the server; refuse rather than ignore it.
        if (const auto leaked = find_secret_fields(payload); !leaked.empty())
          return error_message(request.request_id, "bad_payload",
                               "TuneRequest carries secret-key field '" + leaked.front() + "'");
        const EncryptedDatasetD d = dataset_d_from_json(payload);
        const auto t0 = std::chrono::steady_clock::now();
        const EncryptedDatasetF f = server_tune(d);
        const auto t1 = std::chrono::steady_clock::now();
        Message reply;
        reply.type = MessageType::TuneResponse;
        reply.request_id = request.request_id;
        reply.payload = to_json(f);
        reply.server_seconds = std::chrono::duration<double>(t1 - t0).count();
        return reply;
      } catch (const Error& e) {
        return error_message(request.request_id, e.code(), e.what());
      } catch (const std::exception& e) {
        return error_message(request.request_id, "internal", e.what());
      }
    }
    default:
      return error_message(request.request_id, "unexpected_message",
                           "server does not accept " + type_name(request.type) + " messages");
  }
}

Message round_trip(const std::string& host, std::uint16_t port, const Message& request,
                   const ClientOptions& options) {
  Socket s = connect_to(host, port, options.timeout);
  const std::string out = message_to_json(request).dump();
  if (options.observer) options.observer(true, out);
  write_frame(s.fd(), out, options.max_frame);
  const auto body = read_frame(s.fd(), options.max_frame);
  if (!body) throw NetworkError("server closed the connection without replying");
  if (options.observer) options.observer(false, *body);
  try {
    return message_from_json(Json::parse(*body));
  } catch (const Json::exception& e) {
    throw bad_frame(std::string("reply is not JSON: ") + e.what());
  }
}

RemoteTuneResult request_tune_detailed(const std::string& host, std::uint16_t port,
                                       const EncryptedDatasetD& d, const ClientOptions& options) {
  Message request;
  request.type = MessageType::TuneRequest;
  request.request_id = new_request_id();
  request.payload = to_json(d);
  const Message reply = round_trip(host, port, request, options);
  if (reply.type == MessageType::Error) {
    const std::string code =
        reply.payload.contains("code") ? reply.payload["code"].get<std::string>() : "remote";
    const std::string detail =
        reply.payload.contains("detail") ? reply.payload["detail"].get<std::string>() : "";
    throw RemoteError(code, detail);
  }
  if (reply.request_id != request.request_id)
    throw ProtocolError("reply id '" + reply.request_id + "' does not match request '" +
                        request.request_id + "'");
  if (reply.type != MessageType::TuneResponse)
    throw ProtocolError("expected TuneResponse, got " + type_name(reply.type));
  RemoteTuneResult out{dataset_f_from_json(reply.payload), reply.server_seconds.value_or(0.0)};
  if (scheme_name(out.result) != scheme_name(d))
    throw ProtocolError("reply scheme '" + scheme_name(out.result) + "' differs from the request");
  return out;
}

EncryptedDatasetF request_tune(const std::string& host, std::uint16_t port, const EncryptedDatasetD& d,
                               const ClientOptions& options) {
  return request_tune_detailed(host, port, d, options).result;
}

std::pair<std::string, std::uint16_t> parse_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) return {address, kDefaultPort};
  const std::string host = address.substr(0, colon);
  const std::string port = address.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long p = std::stoul(port, &used);
    if (used != port.size() || p == 0 || p > 65535) throw std::out_of_range("port");
    return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(p)};
  } catch (const std::exception&) {
    throw InvalidArgument("bad address '" + address + "' (expected HOST:PORT)");
  }
}

}  // namespace cfrit::wire
