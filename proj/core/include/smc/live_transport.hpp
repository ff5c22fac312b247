#ifndef SMC_LIVE_TRANSPORT_HPP
#define SMC_LIVE_TRANSPORT_HPP

#include <atomic>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "smc/transport.hpp"

namespace smc {

// Thin live-socket counterpart to the simulated Network: the same Message
// structs, length-prefixed over loopback TCP. Demo plumbing only -- the
// deterministic simulator remains the reference transport for every
// experiment and test.

class WireError : public std::runtime_error {
 public:
  explicit WireError(const std::string& what) : std::runtime_error(what) {}
};

Bytes encode_message(const Message& m);
Message decode_message(const Bytes& frame);

// Serves a TupleSpace over 127.0.0.1 on an ephemeral port, one thread per
// connection, all space access under a single lock. Ticks advance with each
// handled request (a logical clock; real time plays no role).
class LiveSpaceServer {
 public:
  explicit LiveSpaceServer(std::uint64_t take_seed);
  ~LiveSpaceServer();

  LiveSpaceServer(const LiveSpaceServer&) = delete;
  LiveSpaceServer& operator=(const LiveSpaceServer&) = delete;

  int port() const { return port_; }
  void stop();

 private:
  void serve(int client_fd);
  Payload handle(const Message& m);

  TupleSpace space_;
  std::mutex space_mu_;
  std::atomic<Tick> clock_{0};
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::vector<std::thread> conn_threads_;
  std::vector<int> open_fds_;
};

// Blocking request/reply client. Safe for concurrent sends: each call holds
// the socket for one full round trip.
class LiveClient {
 public:
  LiveClient(std::string agent_id, int port);
  ~LiveClient();

  LiveClient(const LiveClient&) = delete;
  LiveClient& operator=(const LiveClient&) = delete;

  Payload request(Payload body);

 private:
  std::string agent_id_;
  int fd_ = -1;
  std::mutex mu_;
};

}  // namespace smc

#endif
