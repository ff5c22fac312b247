#include "smc/live_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

namespace smc {

namespace {

// --- primitive encoders ------------------------------------------------------

void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }

std::uint8_t get_u8(const Bytes& in, std::size_t& pos) {
  if (pos >= in.size()) throw WireError("truncated frame");
  return in[pos++];
}

void put_i64(Bytes& out, std::int64_t v) { append_i64(out, v); }

std::int64_t get_i64(const Bytes& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw WireError("truncated frame");
  const std::int64_t v = read_i64(in, pos);
  pos += 8;
  return v;
}

void put_u64(Bytes& out, std::uint64_t v) {
  put_i64(out, static_cast<std::int64_t>(v));
}

std::uint64_t get_u64(const Bytes& in, std::size_t& pos) {
  return static_cast<std::uint64_t>(get_i64(in, pos));
}

void put_bytes(Bytes& out, const Bytes& v) {
  put_i64(out, static_cast<std::int64_t>(v.size()));
  out.insert(out.end(), v.begin(), v.end());
}

Bytes get_bytes(const Bytes& in, std::size_t& pos) {
  const auto n = static_cast<std::size_t>(get_i64(in, pos));
  if (pos + n > in.size()) throw WireError("truncated frame");
  Bytes v(in.begin() + static_cast<std::ptrdiff_t>(pos),
          in.begin() + static_cast<std::ptrdiff_t>(pos + n));
  pos += n;
  return v;
}

void put_str(Bytes& out, const std::string& s) {
  put_i64(out, static_cast<std::int64_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

std::string get_str(const Bytes& in, std::size_t& pos) {
  const Bytes b = get_bytes(in, pos);
  return std::string(b.begin(), b.end());
}

// --- domain encoders ---------------------------------------------------------

void put_tuple(Bytes& out, const Tuple& t) {
  put_str(out, t.key.app_id);
  put_u8(out, static_cast<std::uint8_t>(t.key.kind));
  put_i64(out, t.key.task_id);
  put_u64(out, t.key.attempt);
  put_bytes(out, t.payload);
  put_i64(out, t.created_at);
}

Tuple get_tuple(const Bytes& in, std::size_t& pos) {
  Tuple t;
  t.key.app_id = get_str(in, pos);
  t.key.kind = static_cast<TupleKind>(get_u8(in, pos));
  t.key.task_id = get_i64(in, pos);
  t.key.attempt = static_cast<std::uint32_t>(get_u64(in, pos));
  t.payload = get_bytes(in, pos);
  t.created_at = get_i64(in, pos);
  return t;
}

void put_pattern(Bytes& out, const Pattern& p) {
  put_str(out, p.app_id);
  put_u8(out, static_cast<std::uint8_t>(p.kind));
  put_u8(out, p.task_id ? 1 : 0);
  if (p.task_id) put_i64(out, *p.task_id);
}

Pattern get_pattern(const Bytes& in, std::size_t& pos) {
  Pattern p;
  p.app_id = get_str(in, pos);
  p.kind = static_cast<TupleKind>(get_u8(in, pos));
  if (get_u8(in, pos)) p.task_id = get_i64(in, pos);
  return p;
}

void put_result(Bytes& out, const StoredResult& r) {
  put_i64(out, r.task_id);
  put_bytes(out, r.payload);
  put_i64(out, r.accepted_at);
  put_u64(out, r.accept_seq);
  put_str(out, r.worker_id);
}

StoredResult get_result(const Bytes& in, std::size_t& pos) {
  StoredResult r;
  r.task_id = get_i64(in, pos);
  r.payload = get_bytes(in, pos);
  r.accepted_at = get_i64(in, pos);
  r.accept_seq = get_u64(in, pos);
  r.worker_id = get_str(in, pos);
  return r;
}

void put_payload(Bytes& out, const Payload& body) {
  put_u8(out, static_cast<std::uint8_t>(body.index()));
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TakeRequest>) {
          put_pattern(out, v.pattern);
          put_u64(out, v.req_id);
          put_i64(out, v.lease_len);
        } else if constexpr (std::is_same_v<T, TakeReply>) {
          put_u64(out, v.req_id);
          put_u8(out, v.task ? 1 : 0);
          if (v.task) put_tuple(out, *v.task);
        } else if constexpr (std::is_same_v<T, PutRequest>) {
          put_tuple(out, v.tuple);
        } else if constexpr (std::is_same_v<T, PutAck>) {
          put_i64(out, v.task_id);
        } else if constexpr (std::is_same_v<T, CompleteRequest>) {
          put_str(out, v.app_id);
          put_i64(out, v.task_id);
          put_bytes(out, v.result);
          put_i64(out, v.units);
        } else if constexpr (std::is_same_v<T, SnapshotRequest>) {
          // no fields
        } else if constexpr (std::is_same_v<T, SnapshotReply>) {
          put_i64(out, v.snap.pending);
          put_i64(out, v.snap.shadowed);
          put_i64(out, v.snap.completed);
          put_i64(out, v.snap.total_attempts);
        } else if constexpr (std::is_same_v<T, ResultsRequest>) {
          put_str(out, v.app_id);
        } else if constexpr (std::is_same_v<T, ResultsReply>) {
          put_i64(out, static_cast<std::int64_t>(v.results.size()));
          for (const StoredResult& r : v.results) put_result(out, r);
        }
      },
      body);
}

Payload get_payload(const Bytes& in, std::size_t& pos) {
  switch (get_u8(in, pos)) {
    case 0: {
      TakeRequest v;
      v.pattern = get_pattern(in, pos);
      v.req_id = get_u64(in, pos);
      v.lease_len = get_i64(in, pos);
      return v;
    }
    case 1: {
      TakeReply v;
      v.req_id = get_u64(in, pos);
      if (get_u8(in, pos)) v.task = get_tuple(in, pos);
      return v;
    }
    case 2: {
      PutRequest v;
      v.tuple = get_tuple(in, pos);
      return v;
    }
    case 3: {
      PutAck v;
      v.task_id = get_i64(in, pos);
      return v;
    }
    case 4: {
      CompleteRequest v;
      v.app_id = get_str(in, pos);
      v.task_id = get_i64(in, pos);
      v.result = get_bytes(in, pos);
      v.units = get_i64(in, pos);
      return v;
    }
    case 5:
      return SnapshotRequest{};
    case 6: {
      SnapshotReply v;
      v.snap.pending = get_i64(in, pos);
      v.snap.shadowed = get_i64(in, pos);
      v.snap.completed = get_i64(in, pos);
      v.snap.total_attempts = get_i64(in, pos);
      return v;
    }
    case 7: {
      ResultsRequest v;
      v.app_id = get_str(in, pos);
      return v;
    }
    case 8: {
      ResultsReply v;
      const auto n = static_cast<std::size_t>(get_i64(in, pos));
      v.results.reserve(n);
      for (std::size_t i = 0; i < n; ++i) v.results.push_back(get_result(in, pos));
      return v;
    }
    default:
      throw WireError("unknown payload tag");
  }
}

// --- framed socket I/O -------------------------------------------------------

void write_all(int fd, const void* data, std::size_t n) {
  const char* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w <= 0) throw WireError("socket write failed");
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

bool read_all(int fd, void* data, std::size_t n) {
  char* p = static_cast<char*>(data);
  while (n > 0) {
    const ssize_t r = ::read(fd, p, n);
    if (r == 0) return false;  // orderly shutdown
    if (r < 0) throw WireError("socket read failed");
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

void write_frame(int fd, const Bytes& frame) {
  const std::uint32_t len = static_cast<std::uint32_t>(frame.size());
  write_all(fd, &len, sizeof len);
  write_all(fd, frame.data(), frame.size());
}

bool read_frame(int fd, Bytes& frame) {
  std::uint32_t len = 0;
  if (!read_all(fd, &len, sizeof len)) return false;
  frame.resize(len);
  return read_all(fd, frame.data(), len);
}

}  // namespace

Bytes encode_message(const Message& m) {
  Bytes out;
  put_str(out, m.from);
  put_str(out, m.to);
  put_payload(out, m.body);
  return out;
}

Message decode_message(const Bytes& frame) {
  std::size_t pos = 0;
  Message m;
  m.from = get_str(frame, pos);
  m.to = get_str(frame, pos);
  m.body = get_payload(frame, pos);
  if (pos != frame.size()) throw WireError("trailing bytes in frame");
  return m;
}

// --- server -------------------------------------------------------------------

LiveSpaceServer::LiveSpaceServer(std::uint64_t take_seed) : space_(take_seed) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw WireError("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;  // ephemeral
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 16) != 0)
    throw WireError("bind/listen failed");
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  accept_thread_ = std::thread([this] {
    for (;;) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) return;  // listener closed
      std::lock_guard<std::mutex> lock(conn_mu_);
      if (stopping_) {
        ::close(fd);
        return;
      }
      open_fds_.push_back(fd);
      conn_threads_.emplace_back([this, fd] { serve(fd); });
    }
  });
}

LiveSpaceServer::~LiveSpaceServer() { stop(); }

void LiveSpaceServer::stop() {
  bool expected = false;
  if (!stopping_.compare_exchange_strong(expected, true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  accept_thread_.join();
  std::vector<std::thread> conns;
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    conns.swap(conn_threads_);
    // Unblock serve() threads still waiting on connected clients.
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (std::thread& t : conns) t.join();
}

void LiveSpaceServer::serve(int client_fd) {
  Bytes frame;
  try {
    while (read_frame(client_fd, frame)) {
      const Message m = decode_message(frame);
      Message reply{"space", m.from, handle(m)};
      write_frame(client_fd, encode_message(reply));
    }
  } catch (const WireError&) {
    // drop the connection; clients treat a broken socket as fatal
  }
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    std::erase(open_fds_, client_fd);
  }
  ::close(client_fd);
}

Payload LiveSpaceServer::handle(const Message& m) {
  const Tick now = ++clock_;
  std::lock_guard<std::mutex> lock(space_mu_);
  if (const auto* take = std::get_if<TakeRequest>(&m.body)) {
    space_.expire(now);
    TakeReply reply;
    reply.req_id = take->req_id;
    reply.task = space_.take(take->pattern, m.from, take->lease_len, now);
    return reply;
  }
  if (const auto* put = std::get_if<PutRequest>(&m.body)) {
    Tuple t = put->tuple;
    t.created_at = now;
    space_.put(std::move(t));
    return PutAck{put->tuple.key.task_id};
  }
  if (const auto* complete = std::get_if<CompleteRequest>(&m.body)) {
    space_.complete(complete->app_id, complete->task_id, complete->result, m.from, now);
    return PutAck{complete->task_id};
  }
  if (std::holds_alternative<SnapshotRequest>(m.body)) {
    return SnapshotReply{space_.snapshot()};
  }
  if (const auto* results = std::get_if<ResultsRequest>(&m.body)) {
    return ResultsReply{space_.results(results->app_id)};
  }
  throw WireError("unexpected message kind at the space");
}

// --- client -------------------------------------------------------------------

LiveClient::LiveClient(std::string agent_id, int port) : agent_id_(std::move(agent_id)) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw WireError("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw WireError("connect failed");
}

LiveClient::~LiveClient() {
  if (fd_ >= 0) ::close(fd_);
}

Payload LiveClient::request(Payload body) {
  std::lock_guard<std::mutex> lock(mu_);
  write_frame(fd_, encode_message(Message{agent_id_, "space", std::move(body)}));
  Bytes frame;
  if (!read_frame(fd_, frame)) throw WireError("space closed the connection");
  return decode_message(frame).body;
}

}  // namespace smc
