#ifndef CROWDGAME_DMPC_TRANSPORT_HPP
#define CROWDGAME_DMPC_TRANSPORT_HPP

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "crowdgame/dmpc/messages.hpp"

namespace crowdgame {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coordinator-side endpoint: one logical channel per robot.
class CoordinatorTransport {
public:
    virtual ~CoordinatorTransport() = default;
    virtual int num_robots() const = 0;
    virtual void send(int robot, const DmpcMessage& msg) = 0;
    /// Blocks until a message from `robot` arrives; throws TransportError
    /// on timeout or channel failure.
    virtual DmpcMessage recv(int robot, std::chrono::milliseconds timeout) = 0;
};

/// Worker-side endpoint.
class WorkerTransport {
public:
    virtual ~WorkerTransport() = default;
    virtual void send(const DmpcMessage& msg) = 0;
    virtual DmpcMessage recv(std::chrono::milliseconds timeout) = 0;
};

/// Reactive worker: consumes one coordinator message, produces replies.
using WorkerHandler = std::function<std::vector<DmpcMessage>(const DmpcMessage&)>;

/// Single-threaded in-process transport. Coordinator sends are queued and
/// handed to worker handlers in a deterministic order (FIFO by default, a
/// test-supplied schedule otherwise); replies queue per robot. The whole
/// exchange runs on the caller's thread, which makes runs reproducible.
class LocalTransport final : public CoordinatorTransport {
public:
    /// Picks which robot's channel delivers next; receives the distinct
    /// robots with queued messages, oldest-first. Per-robot order is
    /// always FIFO.
    using Schedule = std::function<std::size_t(const std::vector<int>& pending_robots)>;

    explicit LocalTransport(std::vector<WorkerHandler> workers, Schedule schedule = {});

    int num_robots() const override { return static_cast<int>(workers_.size()); }
    void send(int robot, const DmpcMessage& msg) override;
    DmpcMessage recv(int robot, std::chrono::milliseconds timeout) override;

    /// Delivers everything still queued (e.g. the final Terminate).
    void flush();

private:
    void deliver_one();

    std::vector<WorkerHandler> workers_;
    Schedule schedule_;
    std::deque<std::pair<int, DmpcMessage>> pending_;
    std::vector<std::deque<DmpcMessage>> inbox_;
};

/// Length-prefixed JSON frames over a socket: 4-byte big-endian length,
/// then the UTF-8 message body.
void write_frame(int fd, const std::string& body);
std::string read_frame(int fd, std::chrono::milliseconds timeout);

/// Coordinator endpoint over local TCP. Listens, then accepts exactly
/// `num_robots` connections, each introduced by a hello frame
/// {"type":"hello","robot":<id>}.
class TcpCoordinatorTransport final : public CoordinatorTransport {
public:
    /// port = 0 picks an ephemeral port; see port().
    TcpCoordinatorTransport(int num_robots, int port);
    ~TcpCoordinatorTransport() override;

    int port() const { return port_; }
    /// Blocks until all workers have connected and said hello.
    void accept_workers(std::chrono::milliseconds timeout);

    int num_robots() const override { return static_cast<int>(sockets_.size()); }
    void send(int robot, const DmpcMessage& msg) override;
    DmpcMessage recv(int robot, std::chrono::milliseconds timeout) override;

private:
    int listen_fd_ = -1;
    int port_ = 0;
    std::vector<int> sockets_;
};

class TcpWorkerTransport final : public WorkerTransport {
public:
    TcpWorkerTransport(const std::string& host, int port, int robot_id);
    ~TcpWorkerTransport() override;

    void send(const DmpcMessage& msg) override;
    DmpcMessage recv(std::chrono::milliseconds timeout) override;

private:
    int fd_ = -1;
};

}  // namespace crowdgame

#endif  // CROWDGAME_DMPC_TRANSPORT_HPP
