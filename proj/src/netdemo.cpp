#include "arpf/netdemo.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <numbers>

namespace arpf {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

wire::Frame read_frame(int fd, bool& eof) {
  std::uint8_t head[wire::kHeaderSize];
  eof = false;
  if (!read_exact(fd, head, sizeof head)) {
    eof = true;
    return {};
  }
  const wire::Header h = wire::decode_header({head, sizeof head});
  wire::Frame f{h.version, h.type, std::vector<std::uint8_t>(h.length)};
  if (h.length && !read_exact(fd, f.payload.data(), h.length)) throw ConnectionError("connection closed mid-frame");
  return f;
}

void send_frame(int fd, const wire::Frame& f) {
  const auto bytes = wire::encode(f);
  write_all(fd, bytes.data(), bytes.size());
}

}  // namespace

bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0) return false;
      throw ConnectionError("connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw ConnectionError("receive timed out");
      throw ConnectionError(errno_text("recv"));
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

void write_all(int fd, const std::uint8_t* buf, std::size_t n) {
  std::size_t put = 0;
  while (put < n) {
    const ssize_t r = ::send(fd, buf + put, n - put, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(errno_text("send"));
    }
    put += static_cast<std::size_t>(r);
  }
}

std::shared_ptr<const ServerState> ServerState::create(SvmModel model, std::vector<FeatureVector> database) {
  if (!model.embedding) throw std::invalid_argument("server: model has no embedding reference");
  if (database.empty()) throw std::invalid_argument("server: empty database");
  if (database.front().size() != model.embedding->m)
    throw std::invalid_argument("server: database m does not match the model's embedding");
  for (const auto& c : model.classes)
    for (auto idx : c.support)
      if (idx >= database.size()) throw std::invalid_argument("server: support index outside the database");
  Predictor predictor(model, database);
  EmbeddingRef ref = *model.embedding;
  return std::make_shared<const ServerState>(
      ServerState{std::move(model), std::move(ref), std::move(database), std::move(predictor)});
}

std::vector<wire::Similarity> ServerState::top_k(const FeatureVector& query, std::size_t k) const {
  std::vector<wire::Similarity> all(database.size());
  for (std::size_t i = 0; i < database.size(); ++i)
    all[i] = {i, rescaled_kernel_estimate(query, database[i], Table3Combo::QCos)};
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    [](const auto& a, const auto& b) { return a.value > b.value || (a.value == b.value && a.index < b.index); });
  all.resize(k);
  return all;
}

wire::ClassResult ServerState::classify(const FeatureVector& query) const {
  wire::ClassResult r;
  r.scores = predictor.scores(query, Table3Combo::QCos);
  r.label = predictor.predict(query, Table3Combo::QCos);
  return r;
}

Server::Server(std::shared_ptr<const ServerState> state) : state_(std::move(state)) {
  if (!state_) throw std::invalid_argument("server: null state");
}

Server::~Server() { stop(); }

void Server::start(const std::string& host, std::uint16_t port) {
  if (running_) throw std::logic_error("server already running");
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ConnectionError(errno_text("socket"));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::invalid_argument("server: bad IPv4 address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 64) < 0) {
    const auto msg = errno_text("bind/listen");
    ::close(listen_fd_);
    throw ConnectionError(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
  if (!running_.exchange(false)) return;
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

void Server::accept_loop() {
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 50);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(mu_);
    open_fds_.insert(fd);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void Server::serve_connection(int fd) {
  wire::HelloRequest session;
  try {
    for (;;) {
      bool eof = false;
      const wire::Frame in = read_frame(fd, eof);
      if (eof) break;
      if (in.version != wire::kVersion) {
        send_frame(fd, wire::make_error(wire::ErrorCode::VersionMismatch,
                                        "unsupported protocol version " + std::to_string(in.version)));
        continue;
      }
      switch (in.type) {
        case wire::MessageType::Hello: {
          session = wire::parse_hello(in);
          const auto& e = state_->embedding;
          send_frame(fd, wire::make_hello_reply({static_cast<std::uint32_t>(e.m), e.seed,
                                                 state_->database.size(), e.sampler}));
          break;
        }
        case wire::MessageType::QueryBits: {
          PackedBits bits = wire::parse_query(in);
          if (bits.m != state_->embedding.m) {
            send_frame(fd, wire::make_error(wire::ErrorCode::BadRequest, "query m does not match the server"));
            break;
          }
          const FeatureVector q = FeatureVector::packed(std::move(bits));
          if (session.mode == wire::Mode::Classify) send_frame(fd, wire::make_class_reply(state_->classify(q)));
          else send_frame(fd, wire::make_similarity_reply(state_->top_k(q, session.top_k)));
          break;
        }
        default:
          send_frame(fd, wire::make_error(wire::ErrorCode::BadRequest, "unexpected message type"));
      }
    }
  } catch (const std::exception&) {
    // Malformed frames and socket errors end the connection.
  }
  std::lock_guard lock(mu_);
  open_fds_.erase(fd);
  ::close(fd);
}

Client::Client(const std::string& host, std::uint16_t port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw ConnectionError("resolve " + host + ": " + ::gai_strerror(rc));
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw ConnectionError(errno_text("socket"));
  }
  timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  const int rc = ::connect(fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc < 0) {
    const auto msg = errno_text(("connect " + host + ":" + service).c_str());
    ::close(fd_);
    fd_ = -1;
    throw ConnectionError(msg);
  }
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

void Client::send(const wire::Frame& f) {
  const auto bytes = wire::encode(f);
  write_all(fd_, bytes.data(), bytes.size());
  sent_ += bytes.size();
  last_payload_ = f.payload.size();
}

wire::Frame Client::receive() {
  bool eof = false;
  wire::Frame f;
  try {
    f = read_frame(fd_, eof);
  } catch (const wire::MalformedFrame& e) {
    throw ProtocolError(wire::ErrorCode::BadRequest, std::string("malformed reply: ") + e.what());
  }
  if (eof) throw ConnectionError("server closed the connection");
  return f;
}

wire::Frame Client::roundtrip(const wire::Frame& frame) {
  send(frame);
  return receive();
}

namespace {
[[noreturn]] void raise(const wire::Frame& f) {
  if (f.type == wire::MessageType::Error) {
    const auto e = wire::parse_error(f);
    throw ProtocolError(e.code, "server error " + std::to_string(static_cast<int>(e.code)) + ": " + e.message);
  }
  throw ProtocolError(wire::ErrorCode::BadRequest, "unexpected reply type");
}
}  // namespace

wire::HelloReply Client::hello(wire::Mode mode, std::uint32_t top_k) {
  const auto f = roundtrip(wire::make_hello({mode, top_k}));
  if (f.type != wire::MessageType::Hello) raise(f);
  return wire::parse_hello_reply(f);
}

wire::ClassResult Client::classify(const PackedBits& bits) {
  const auto f = roundtrip(wire::make_query(bits));
  if (f.type != wire::MessageType::ClassReply) raise(f);
  return wire::parse_class_reply(f);
}

std::vector<wire::Similarity> Client::similar(const PackedBits& bits) {
  const auto f = roundtrip(wire::make_query(bits));
  if (f.type != wire::MessageType::SimilarityReply) raise(f);
  return wire::parse_similarity_reply(f);
}

}  // namespace arpf
