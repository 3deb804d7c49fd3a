#pragma once

// Wire protocol between a session and UI clients. Messages are JSON objects
// carrying "v":1 and a "type":
//
//   server -> client: scene, diagnostic, menu-request
//   client -> server: hello, event, menu-reply
//
// Every scene carries a revision that goes up by one per state change; events
// name the revision they were produced against. On a socket each message is
// framed by a 4-byte big-endian length.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "projed/session.hpp"

namespace projed {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kDefaultPort = 7155;

class BridgeError : public Error {
 public:
  using Error::Error;
};

std::string encode_scene(const Scene& scene, std::uint64_t revision,
                         const std::vector<std::string>& diagnostics = {});
std::string encode_diagnostic(const std::string& text, std::uint64_t revision,
                              const std::optional<std::string>& path = std::nullopt);
std::string encode_menu_request(const PendingEdgeChoice& choice, std::uint64_t revision);

// Client side of the protocol; the server decodes these.
std::string encode_hello();
std::string encode_event(const Event& e, std::uint64_t revision);
std::string encode_menu_reply(const std::string& label, std::uint64_t revision);

struct ClientMessage {
  enum class Type { Hello, Event, MenuReply };
  Type type = Type::Hello;
  std::optional<std::uint64_t> revision;
  std::optional<Event> event;
  std::string label;
  int version = kProtocolVersion;
};

// Throws BridgeError naming what is wrong.
ClientMessage decode_message(std::string_view bytes);
Event decode_event(std::string_view bytes);

struct Outgoing {
  enum class To { Sender, All };
  To to = To::Sender;
  std::string message;
};

// The protocol state machine without any transport: owns the session and the
// revision counter, and records accepted events as script lines.
class BridgeEngine {
 public:
  explicit BridgeEngine(Session s) : session_(std::move(s)) {}

  std::vector<Outgoing> handle(std::string_view message);
  std::string scene_message() const;

  const Session& session() const { return session_; }
  std::uint64_t revision() const { return revision_; }
  const std::vector<std::string>& recorded_script() const { return script_; }

 private:
  std::vector<Outgoing> handle_event(const Event& e, std::optional<std::uint64_t> revision);
  std::vector<Outgoing> after_change(const Session& next, const std::string& line);

  Session session_;
  std::uint64_t revision_ = 0;
  std::vector<std::string> script_;
  std::optional<std::string> pending_line_;  // edge drag waiting for its type
};

bool write_frame(int fd, std::string_view message);
// Nothing on orderly close or error.
std::optional<std::string> read_frame(int fd);

// Serves one engine on a TCP port. Socket reads feed a queue drained by the
// thread that called run(); replies fan out from there.
class BridgeServer {
 public:
  // Port 0 picks a free port. Throws IoError when the port cannot be bound.
  BridgeServer(BridgeEngine engine, int port, const std::string& host = "127.0.0.1");
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  int port() const { return port_; }
  void run();   // blocks until stop()
  void stop();  // safe from any thread
  // A copy of the engine state, for inspection while running.
  Session session() const;
  std::vector<std::string> recorded_script() const;

 private:
  struct Client {
    int fd = -1;
    std::mutex write_mutex;
    ~Client();
  };
  struct Inbound {
    int client = 0;
    std::string message;
    bool connected = false;  // a new client, not a message
  };

  void accept_loop();
  void read_loop(int id, std::shared_ptr<Client> client);
  void send_to(int id, const std::string& message);
  void broadcast(const std::string& message);
  void push(Inbound in);

  BridgeEngine engine_;
  mutable std::mutex engine_mutex_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::vector<std::thread> readers_;

  std::mutex clients_mutex_;
  std::map<int, std::shared_ptr<Client>> clients_;
  int next_client_ = 1;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<Inbound> queue_;
};

// Minimal blocking client, used by tests and tools.
class BridgeClient {
 public:
  BridgeClient(const std::string& host, int port);
  ~BridgeClient();
  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  void send(std::string_view message);
  // Waits up to timeout_ms; nothing on timeout or close.
  std::optional<std::string> receive(int timeout_ms = 2000);

 private:
  int fd_ = -1;
};

}  // namespace projed
