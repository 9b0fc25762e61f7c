#pragma once

// Remote classification with one-bit queries: the server holds full-precision
// cos features of a database and an SVM model; clients send only the packed
// universal-quantizer bits of their query.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "arpf/features.hpp"
#include "arpf/svm.hpp"
#include "arpf/wire.hpp"

namespace arpf {

/// Read-only state shared by all connections.
struct ServerState {
  SvmModel model;
  EmbeddingRef embedding;
  std::vector<FeatureVector> database;  // DenseReal cos features
  Predictor predictor;

  /// Throws std::invalid_argument when the model's embedding reference does
  /// not match the database (m) or is missing.
  static std::shared_ptr<const ServerState> create(SvmModel model, std::vector<FeatureVector> database);

  /// (π/2) ⟨z_q(query), z_cos(x_i)⟩ for every database row, best k first
  /// (ties by index).
  std::vector<wire::Similarity> top_k(const FeatureVector& query, std::size_t k) const;
  wire::ClassResult classify(const FeatureVector& query) const;
};

class Server {
 public:
  explicit Server(std::shared_ptr<const ServerState> state);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting; port 0 picks an ephemeral port.
  void start(const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  std::uint16_t port() const noexcept { return port_; }
  /// Closes the listener and all open connections, then joins every thread.
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  std::shared_ptr<const ServerState> state_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::set<int> open_fds_;
  std::vector<std::thread> workers_;
};

/// Socket-level failure: refused, reset, timed out.
struct ConnectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The server answered with an Error frame or something unexpected.
struct ProtocolError : std::runtime_error {
  ProtocolError(wire::ErrorCode c, const std::string& what) : std::runtime_error(what), code(c) {}
  wire::ErrorCode code;
};

class Client {
 public:
  Client(const std::string& host, std::uint16_t port, int timeout_ms = 5000);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  wire::HelloReply hello(wire::Mode mode, std::uint32_t top_k = 10);
  wire::ClassResult classify(const PackedBits& bits);
  std::vector<wire::Similarity> similar(const PackedBits& bits);

  /// Sends an arbitrary frame and returns the reply (for protocol tests).
  wire::Frame roundtrip(const wire::Frame& frame);

  std::uint64_t bytes_sent() const noexcept { return sent_; }
  std::uint64_t last_payload_bytes() const noexcept { return last_payload_; }

 private:
  void send(const wire::Frame& f);
  wire::Frame receive();

  int fd_ = -1;
  std::uint64_t sent_ = 0;
  std::uint64_t last_payload_ = 0;
};

/// Reads exactly n bytes; false on orderly EOF before the first byte.
bool read_exact(int fd, std::uint8_t* buf, std::size_t n);
void write_all(int fd, const std::uint8_t* buf, std::size_t n);

}  // namespace arpf
