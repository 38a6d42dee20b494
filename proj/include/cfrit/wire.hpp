#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cfrit/confidential.hpp"
#include "cfrit/serialize.hpp"

namespace cfrit::wire {

inline constexpr std::uint16_t kDefaultPort = 7461;
inline constexpr std::size_t kDefaultMaxFrame = std::size_t{256} << 20;

enum class MessageType { TuneRequest, TuneResponse, Error, Ping, Pong };

std::string type_name(MessageType t);
MessageType type_from_name(const std::string& name);

struct Message {
  MessageType type = MessageType::Ping;
  std::string request_id;
  Json payload = Json::object();
  /// Server-side wall time of a tuning job, reported with TuneResponse.
  std::optional<double> server_seconds;
};

Json message_to_json(const Message& m);
/// Throws ProtocolError("bad_frame") if the document is not a message.
Message message_from_json(const Json& j);
Message error_message(const std::string& request_id, const std::string& code, const std::string& detail);

/// 4-byte big-endian length followed by the body.
std::string encode_frame(const std::string& body);

/// Blocking frame I/O on a connected socket. read_frame returns nullopt on a
/// clean close before the header; a close mid-frame raises
/// ProtocolError("bad_frame"), an oversize header ProtocolError("frame_too_large"),
/// a receive timeout TimeoutError.
void write_frame(int fd, const std::string& body, std::size_t max_frame = kDefaultMaxFrame);
std::optional<std::string> read_frame(int fd, std::size_t max_frame = kDefaultMaxFrame);

/// RAII socket handle.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  int release() { int f = fd_; fd_ = -1; return f; }
  explicit operator bool() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

/// TCP connect with a deadline; applies `timeout` to subsequent reads and writes.
Socket connect_to(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);
/// Listening socket; port 0 picks an ephemeral port.
Socket listen_on(const std::string& bind_address, std::uint16_t port);
std::uint16_t local_port(const Socket& s);

struct ServerOptions {
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = kDefaultPort;
  std::size_t max_frame = kDefaultMaxFrame;
  std::set<std::string> schemes{"elgamal", "ckks"};
};

/// Tuning service: one thread per connection, one request at a time per
/// connection. Malformed frames get an Error reply and the connection closes.
class TuneServer {
 public:
  explicit TuneServer(ServerOptions options);
  ~TuneServer();
  TuneServer(const TuneServer&) = delete;
  TuneServer& operator=(const TuneServer&) = delete;

  /// Binds and starts accepting in a background thread.
  void start();
  std::uint16_t port() const { return port_; }
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

  /// Request handling, exposed for in-process use.
  Message handle(const Message& request) const;

 private:
  void accept_loop();
  void serve_connection(int fd);

  ServerOptions options_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::vector<std::thread> workers_;
  std::set<int> open_fds_;
};

struct ClientOptions {
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
  std::size_t max_frame = kDefaultMaxFrame;
  /// Sees every frame body; `outgoing` is true for client-to-server traffic.
  std::function<void(bool outgoing, const std::string& body)> observer;
};

/// Sends one message on a fresh connection and returns the reply.
Message round_trip(const std::string& host, std::uint16_t port, const Message& request,
                   const ClientOptions& options = {});

struct RemoteTuneResult {
  EncryptedDatasetF result;
  double server_seconds = 0.0;
};

/// Outsources tuning. Error replies surface as RemoteError with the server's
/// code; a mismatched id, type or scheme raises ProtocolError.
RemoteTuneResult request_tune_detailed(const std::string& host, std::uint16_t port,
                                       const EncryptedDatasetD& d, const ClientOptions& options = {});
EncryptedDatasetF request_tune(const std::string& host, std::uint16_t port, const EncryptedDatasetD& d,
                               const ClientOptions& options = {});

/// Splits "host:port"; the port defaults to kDefaultPort.
std::pair<std::string, std::uint16_t> parse_address(const std::string& address);

}  // namespace cfrit::wire
