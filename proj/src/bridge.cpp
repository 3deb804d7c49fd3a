#include "projed/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "json.hpp"

#include "projed/persist.hpp"
#include "projed/script.hpp"

namespace projed {

using nlohmann::json;

namespace {

// Text that arrived as invalid UTF-8 (it can be echoed back in diagnostics)
// is written with replacement characters rather than failing.
std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

// ---- identities and terms --------------------------------------------------

json part_json(const Atom& a) {
  if (a.is_int()) return a.as_int();
  if (a.is_bool()) return a.as_bool();
  if (a.is_char()) return json{{"char", utf8_encode(a.as_char().value)}};
  return a.as_string();
}

Atom part_from_json(const json& j) {
  if (j.is_number_integer()) return Atom(j.get<std::int64_t>());
  if (j.is_boolean()) return Atom(j.get<bool>());
  if (j.is_string()) return Atom(j.get<std::string>());
  if (j.is_object() && j.contains("char")) {
    std::u32string cps = utf8_decode(j.at("char").get<std::string>());
    if (cps.size() == 1) return Atom(Char{cps[0]});
  }
  throw BridgeError("bad identity part " + dump(j));
}

json id_json(const Identity& id) {
  json out = json::array();
  for (const auto& p : id.parts()) out.push_back(part_json(p));
  return out;
}

json opt_id_json(const std::optional<Identity>& id) { return id ? id_json(*id) : json(nullptr); }

Identity id_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw BridgeError("an identity is a non-empty array");
  std::vector<Atom> parts;
  for (const auto& p : j) parts.push_back(part_from_json(p));
  return Identity(std::move(parts));
}

json term_json(const Term& t) {
  if (t.is_atom()) return json{{"atom", part_json(t.atom())}};
  if (t.is_hole()) {
    const Hole& h = t.hole();
    json out{{"hole", id_json(h.id)},
             {"kind", std::string(to_string(h.kind))},
             {"ref", h.ref.to_string()}};
    if (h.kind == HoleKind::Text) out["text"] = h.text;
    if (h.shown) out["shown"] = true;
    return out;
  }
  json kids = json::array();
  for (const auto& k : t.children()) kids.push_back(term_json(k));
  return json{{"functor", t.compound().functor}, {"id", id_json(t.compound().id)},
              {"children", kids}};
}

Term term_from_json(const json& j) {
  if (!j.is_object()) throw BridgeError("a term is an object");
  if (j.contains("atom")) return Term(part_from_json(j.at("atom")));
  if (j.contains("hole")) {
    auto kind = hole_kind_from_string(j.at("kind").get<std::string>());
    auto ref = HoleRef::parse(j.value("ref", std::string()));
    if (!kind || !ref) throw BridgeError("bad hole " + dump(j));
    return Term(Hole{id_from_json(j.at("hole")), *kind, *ref, j.value("text", std::string()),
                     j.value("shown", false)});
  }
  std::vector<Term> kids;
  for (const auto& k : j.value("children", json::array())) kids.push_back(term_from_json(k));
  return Term(Compound{j.at("functor").get<std::string>(), id_from_json(j.at("id")),
                       std::move(kids)});
}

json menu_json(const Menu& menu) {
  json out = json::array();
  for (const auto& e : menu) out.push_back({{"label", e.label}, {"message", term_json(e.message)}});
  return out;
}

json envelope(std::string_view type) { return json{{"v", kProtocolVersion}, {"type", type}}; }

// ---- events ----------------------------------------------------------------

json event_json(const Event& e) {
  return std::visit(
      [](const auto& ev) -> json {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, KeyPressed>) {
          json out{{"kind", "key"}, {"selected", opt_id_json(ev.selected)}};
          if (const auto* c = std::get_if<Char>(&ev.key)) {
            out["char"] = utf8_encode(c->value);
          } else {
            out["name"] = std::get<std::string>(ev.key);
          }
          return out;
        } else if constexpr (std::is_same_v<T, DoubleClick>) {
          return {{"kind", "dblclick"}, {"target", id_json(ev.target)}};
        } else if constexpr (std::is_same_v<T, NewEdge>) {
          return {{"kind", "new-edge"},
                  {"type", term_json(ev.type)},
                  {"source", id_json(ev.source)},
                  {"target", id_json(ev.target)}};
        } else if constexpr (std::is_same_v<T, MenuSelected>) {
          return {{"kind", "menu"},
                  {"target", id_json(ev.target)},
                  {"label", ev.label},
                  {"message", ev.message ? term_json(*ev.message) : json(nullptr)}};
        } else if constexpr (std::is_same_v<T, DragNode>) {
          return {{"kind", "drag"}, {"node", id_json(ev.node)}, {"x", ev.x}, {"y", ev.y}};
        } else if constexpr (std::is_same_v<T, EditText>) {
          return {{"kind", "edit"}, {"target", id_json(ev.target)}, {"text", ev.text}};
        } else {
          return {{"kind", "edge-drag"}, {"source", id_json(ev.source)}, {"target", id_json(ev.target)}};
        }
      },
      e);
}

Event event_from_json(const json& j) {
  if (!j.is_object()) throw BridgeError("an event is an object");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "key") {
    std::optional<Identity> sel;
    if (j.contains("selected") && !j.at("selected").is_null()) sel = id_from_json(j.at("selected"));
    if (j.contains("char")) {
      std::u32string cps = utf8_decode(j.at("char").get<std::string>());
      if (cps.size() != 1) throw BridgeError("key char must be one code point");
      return KeyPressed{sel, Char{cps[0]}};
    }
    std::string name = j.at("name").get<std::string>();
    if (std::find(kNamedKeys.begin(), kNamedKeys.end(), name) == kNamedKeys.end()) {
      throw BridgeError("unknown key name '" + name + "'");
    }
    return KeyPressed{sel, name};
  }
  if (kind == "dblclick") return DoubleClick{id_from_json(j.at("target"))};
  if (kind == "new-edge") {
    return NewEdge{term_from_json(j.at("type")), id_from_json(j.at("source")),
                   id_from_json(j.at("target"))};
  }
  if (kind == "menu") {
    std::optional<Term> message;
    if (j.contains("message") && !j.at("message").is_null()) message = term_from_json(j.at("message"));
    return MenuSelected{id_from_json(j.at("target")), j.at("label").get<std::string>(), message};
  }
  if (kind == "drag") {
    return DragNode{id_from_json(j.at("node")), j.at("x").get<double>(), j.at("y").get<double>()};
  }
  if (kind == "edit") return EditText{id_from_json(j.at("target")), j.at("text").get<std::string>()};
  if (kind == "edge-drag") return EdgeDrag{id_from_json(j.at("source")), id_from_json(j.at("target"))};
  throw BridgeError("unknown event kind '" + kind + "'");
}

json parse_json(std::string_view bytes) {
  try {
    return json::parse(bytes);
  } catch (const json::exception& e) {
    throw BridgeError(std::string("malformed message: ") + e.what());
  }
}

}  // namespace

// ---- messages --------------------------------------------------------------

std::string encode_scene(const Scene& scene, std::uint64_t revision,
                         const std::vector<std::string>& diagnostics) {
  json prims = json::array();
  for (const auto& p : scene.primitives) {
    json jp{{"kind", std::string(to_string(p.kind))},
            {"box", {p.box.x, p.box.y, p.box.w, p.box.h}},
            {"concrete", opt_id_json(p.concrete)},
            {"abstract", opt_id_json(p.abstract)},
            {"selectable", p.selectable}};
    if (!p.text.empty() || p.kind == Primitive::Kind::Text) jp["text"] = p.text;
    if (p.font_size > 0) jp["font_size"] = p.font_size;
    if (p.stroke > 0) jp["stroke"] = p.stroke;
    if (p.fill) jp["fill"] = true;
    if (p.editable) jp["editable"] = true;
    if (!p.points.empty()) {
      json pts = json::array();
      for (const auto& pt : p.points) pts.push_back({pt.x, pt.y});
      jp["points"] = pts;
    }
    if (!p.menu.empty()) jp["menu"] = menu_json(p.menu);
    prims.push_back(std::move(jp));
  }
  json out = envelope("scene");
  out["revision"] = revision;
  out["width"] = scene.width;
  out["height"] = scene.height;
  out["primitives"] = std::move(prims);
  out["diagnostics"] = diagnostics;
  return dump(out);
}

std::string encode_diagnostic(const std::string& text, std::uint64_t revision,
                              const std::optional<std::string>& path) {
  json out = envelope("diagnostic");
  out["revision"] = revision;
  out["text"] = text;
  out["path"] = path ? json(*path) : json(nullptr);
  return dump(out);
}

std::string encode_menu_request(const PendingEdgeChoice& choice, std::uint64_t revision) {
  json out = envelope("menu-request");
  out["revision"] = revision;
  out["purpose"] = "edge-type";
  out["source"] = id_json(choice.source);
  out["target"] = id_json(choice.target);
  out["menu"] = menu_json(choice.menu);
  return dump(out);
}

std::string encode_hello() {
  json out = envelope("hello");
  out["version"] = kProtocolVersion;
  return dump(out);
}

std::string encode_event(const Event& e, std::uint64_t revision) {
  json out = envelope("event");
  out["revision"] = revision;
  out["event"] = event_json(e);
  return dump(out);
}

std::string encode_menu_reply(const std::string& label, std::uint64_t revision) {
  json out = envelope("menu-reply");
  out["revision"] = revision;
  out["label"] = label;
  return dump(out);
}

ClientMessage decode_message(std::string_view bytes) {
  json j = parse_json(bytes);
  try {
    if (!j.is_object()) throw BridgeError("a message is a JSON object");
    if (j.value("v", 0) != kProtocolVersion) {
      throw BridgeError("unsupported protocol version " + j.value("v", json(nullptr)).dump());
    }
    ClientMessage m;
    if (j.contains("revision") && !j.at("revision").is_null()) {
      m.revision = j.at("revision").get<std::uint64_t>();
    }
    std::string type = j.at("type").get<std::string>();
    if (type == "hello") {
      m.type = ClientMessage::Type::Hello;
      m.version = j.value("version", kProtocolVersion);
    } else if (type == "event") {
      m.type = ClientMessage::Type::Event;
      m.event = event_from_json(j.at("event"));
    } else if (type == "menu-reply") {
      m.type = ClientMessage::Type::MenuReply;
      m.label = j.at("label").get<std::string>();
    } else {
      throw BridgeError("unknown message type '" + type + "'");
    }
    return m;
  } catch (const json::exception& e) {
    throw BridgeError(std::string("bad message: ") + e.what());
  }
}

Event decode_event(std::string_view bytes) {
  ClientMessage m = decode_message(bytes);
  if (!m.event) throw BridgeError("not an event message");
  return *m.event;
}

// ---- engine ----------------------------------------------------------------

std::string BridgeEngine::scene_message() const {
  return encode_scene(session_.scene(), revision_, session_.diagnostics());
}

std::vector<Outgoing> BridgeEngine::handle(std::string_view message) {
  ClientMessage m;
  try {
    m = decode_message(message);
  } catch (const BridgeError& e) {
    return {{Outgoing::To::Sender, encode_diagnostic(e.what(), revision_)}};
  }
  switch (m.type) {
    case ClientMessage::Type::Hello:
      if (m.version != kProtocolVersion) {
        return {{Outgoing::To::Sender,
                 encode_diagnostic("unsupported protocol version " + std::to_string(m.version),
                                   revision_)}};
      }
      return {{Outgoing::To::Sender, scene_message()}};
    case ClientMessage::Type::Event:
      return handle_event(*m.event, m.revision);
    case ClientMessage::Type::MenuReply: {
      if (!session_.pending_edge_choice()) {
        return {{Outgoing::To::Sender, encode_diagnostic("no menu is open", revision_)}};
      }
      std::string line = pending_line_.value_or("") + " " + m.label;
      return after_change(session_.choose_pending(m.label), line);
    }
  }
  return {};
}

std::vector<Outgoing> BridgeEngine::handle_event(const Event& e,
                                                 std::optional<std::uint64_t> revision) {
  bool drag = std::holds_alternative<DragNode>(e);
  if (revision && *revision < revision_ && !drag) {
    return {{Outgoing::To::Sender,
             encode_diagnostic("stale event for revision " + std::to_string(*revision) +
                                   " dropped; current is " + std::to_string(revision_),
                               revision_)}};
  }
  Session next = session_.dispatch(e);
  std::string line = script_line(e);
  if (next.pending_edge_choice()) {
    session_ = next;
    pending_line_ = line;
    return {{Outgoing::To::Sender, encode_menu_request(*next.pending_edge_choice(), revision_)}};
  }
  if (std::holds_alternative<EdgeDrag>(e) && next.diagnostics().empty() &&
      next.abstract().same_node(session_.abstract())) {
    script_.push_back(line);
    return {{Outgoing::To::Sender,
             encode_diagnostic("no edge type connects these nodes; edge dropped", revision_)}};
  }
  return after_change(next, line);
}

std::vector<Outgoing> BridgeEngine::after_change(const Session& next, const std::string& line) {
  pending_line_.reset();
  if (!next.diagnostics().empty()) {
    // The state is unchanged on failure; only the sender hears about it.
    std::string text;
    for (const auto& d : next.diagnostics()) text += (text.empty() ? "" : "\n") + d;
    session_ = next;
    return {{Outgoing::To::Sender, encode_diagnostic(text, revision_)}};
  }
  session_ = next;
  ++revision_;
  script_.push_back(line);
  return {{Outgoing::To::All, scene_message()}};
}

// ---- framing ---------------------------------------------------------------

namespace {

bool write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

bool read_all(int fd, char* data, std::size_t n) {
  while (n > 0) {
    ssize_t r = ::recv(fd, data, n, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    data += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

constexpr std::uint32_t kMaxFrame = 64u << 20;

}  // namespace

bool write_frame(int fd, std::string_view message) {
  auto n = static_cast<std::uint32_t>(message.size());
  unsigned char header[4] = {static_cast<unsigned char>(n >> 24), static_cast<unsigned char>(n >> 16),
                             static_cast<unsigned char>(n >> 8), static_cast<unsigned char>(n)};
  return write_all(fd, reinterpret_cast<const char*>(header), 4) &&
         write_all(fd, message.data(), message.size());
}

std::optional<std::string> read_frame(int fd) {
  unsigned char header[4];
  if (!read_all(fd, reinterpret_cast<char*>(header), 4)) return std::nullopt;
  std::uint32_t n = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                    (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (n > kMaxFrame) return std::nullopt;
  std::string out(n, '\0');
  if (n > 0 && !read_all(fd, out.data(), n)) return std::nullopt;
  return out;
}

// ---- server ----------------------------------------------------------------

BridgeServer::BridgeServer(BridgeEngine engine, int port, const std::string& host)
    : engine_(std::move(engine)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw IoError("bad listen address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw IoError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

BridgeServer::~BridgeServer() {
  stop();
  if (accept_thread_.joinable()) accept_thread_.join();
  for (auto& t : readers_) {
    if (t.joinable()) t.join();
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

Session BridgeServer::session() const {
  std::lock_guard lock(engine_mutex_);
  return engine_.session();
}

std::vector<std::string> BridgeServer::recorded_script() const {
  std::lock_guard lock(engine_mutex_);
  return engine_.recorded_script();
}

BridgeServer::Client::~Client() {
  if (fd >= 0) ::close(fd);
}

void BridgeServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  {
    std::lock_guard lock(clients_mutex_);
    for (auto& [id, c] : clients_) ::shutdown(c->fd, SHUT_RDWR);
  }
  queue_cv_.notify_all();
}

void BridgeServer::push(Inbound in) {
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(std::move(in));
  }
  queue_cv_.notify_one();
}

void BridgeServer::accept_loop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    int r = ::poll(&p, 1, 200);
    if (r <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto client = std::make_shared<Client>();
    client->fd = fd;
    int id = 0;
    {
      std::lock_guard lock(clients_mutex_);
      if (stopping_) {
        ::close(fd);
        break;
      }
      id = next_client_++;
      clients_[id] = client;
      readers_.emplace_back(&BridgeServer::read_loop, this, id, client);
    }
    push({id, {}, true});
  }
}

void BridgeServer::read_loop(int id, std::shared_ptr<Client> client) {
  while (!stopping_) {
    auto frame = read_frame(client->fd);
    if (!frame) break;
    push({id, std::move(*frame), false});
  }
  std::lock_guard lock(clients_mutex_);
  clients_.erase(id);
  ::shutdown(client->fd, SHUT_RDWR);
}

void BridgeServer::send_to(int id, const std::string& message) {
  std::shared_ptr<Client> c;
  {
    std::lock_guard lock(clients_mutex_);
    auto it = clients_.find(id);
    if (it == clients_.end()) return;
    c = it->second;
  }
  std::lock_guard lock(c->write_mutex);
  write_frame(c->fd, message);
}

void BridgeServer::broadcast(const std::string& message) {
  std::vector<std::shared_ptr<Client>> all;
  {
    std::lock_guard lock(clients_mutex_);
    for (auto& [id, c] : clients_) all.push_back(c);
  }
  for (auto& c : all) {
    std::lock_guard lock(c->write_mutex);
    write_frame(c->fd, message);
  }
}

void BridgeServer::run() {
  accept_thread_ = std::thread(&BridgeServer::accept_loop, this);
  while (true) {
    Inbound in;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) break;
      in = std::move(queue_.front());
      queue_.pop_front();
    }
    std::vector<Outgoing> out;
    {
      std::lock_guard lock(engine_mutex_);
      if (in.connected) {
        out.push_back({Outgoing::To::Sender, engine_.scene_message()});
      } else {
        out = engine_.handle(in.message);
      }
    }
    for (const auto& o : out) {
      if (o.to == Outgoing::To::All) broadcast(o.message);
      else send_to(in.client, o.message);
    }
  }
}

// ---- client ----------------------------------------------------------------

BridgeClient::BridgeClient(const std::string& host, int port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  ::inet_pton(AF_INET, host.c_str(), &addr.sin_addr);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    std::string why = std::strerror(errno);
    ::close(fd_);
    throw IoError("cannot connect to " + host + ":" + std::to_string(port) + ": " + why);
  }
}

BridgeClient::~BridgeClient() {
  if (fd_ >= 0) ::close(fd_);
}

void BridgeClient::send(std::string_view message) {
  if (!write_frame(fd_, message)) throw IoError("connection lost");
}

std::optional<std::string> BridgeClient::receive(int timeout_ms) {
  pollfd p{fd_, POLLIN, 0};
  if (::poll(&p, 1, timeout_ms) <= 0) return std::nullopt;
  return read_frame(fd_);
}

}  // namespace projed
