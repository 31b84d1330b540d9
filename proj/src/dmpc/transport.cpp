#include "crowdgame/dmpc/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include <json.hpp>

namespace crowdgame {

LocalTransport::LocalTransport(std::vector<WorkerHandler> workers, Schedule schedule)
    : workers_(std::move(workers)), schedule_(std::move(schedule)),
      inbox_(workers_.size()) {}

void LocalTransport::send(int robot, const DmpcMessage& msg) {
    if (robot < 0 || robot >= num_robots()) throw TransportError("LocalTransport: bad robot id");
    pending_.emplace_back(robot, msg);
}

void LocalTransport::deliver_one() {
    if (pending_.empty()) return;
    // Per-robot channels are FIFO; a schedule only reorders across robots.
    std::vector<int> ready;
    for (const auto& [robot, msg] : pending_) {
        if (std::find(ready.begin(), ready.end(), robot) == ready.end()) ready.push_back(robot);
    }
    int robot = ready.front();
    if (schedule_) {
        const std::size_t pick = schedule_(ready);
        if (pick >= ready.size()) throw TransportError("LocalTransport: bad schedule pick");
        robot = ready[pick];
    }
    const auto slot = std::find_if(pending_.begin(), pending_.end(),
                                   [robot](const auto& entry) { return entry.first == robot; });
    DmpcMessage msg = std::move(slot->second);
    pending_.erase(slot);
    auto replies = workers_[static_cast<std::size_t>(robot)](msg);
    for (auto& reply : replies) {
        inbox_[static_cast<std::size_t>(robot)].push_back(std::move(reply));
    }
}

void LocalTransport::flush() {
    while (!pending_.empty()) deliver_one();
}

DmpcMessage LocalTransport::recv(int robot, std::chrono::milliseconds timeout) {
    (void)timeout;  // deliveries are synchronous; nothing ever waits
    auto& box = inbox_.at(static_cast<std::size_t>(robot));
    while (box.empty()) {
        if (pending_.empty()) {
            throw TransportError("LocalTransport: no pending work can produce a message for robot " +
                                 std::to_string(robot));
        }
        deliver_one();
    }
    DmpcMessage msg = std::move(box.front());
    box.pop_front();
    return msg;
}

namespace {

void write_all(int fd, const char* data, std::size_t len) {
    std::size_t written = 0;
    while (written < len) {
        const ssize_t n = ::write(fd, data + written, len - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError("socket write failed");
        }
        written += static_cast<std::size_t>(n);
    }
}

void read_all(int fd, char* data, std::size_t len, std::chrono::steady_clock::time_point deadline) {
    std::size_t got = 0;
    while (got < len) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) throw TransportError("socket read timed out");
        pollfd pfd{fd, POLLIN, 0};
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        const int rc = ::poll(&pfd, 1, static_cast<int>(remaining));
        if (rc == 0) throw TransportError("socket read timed out");
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw TransportError("poll failed");
        }
        const ssize_t n = ::read(fd, data + got, len - got);
        if (n == 0) throw TransportError("socket closed");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError("socket read failed");
        }
        got += static_cast<std::size_t>(n);
    }
}

}  // namespace

void write_frame(int fd, const std::string& body) {
    unsigned char header[4];
    const auto len = static_cast<std::uint32_t>(body.size());
    header[0] = static_cast<unsigned char>((len >> 24) & 0xff);
    header[1] = static_cast<unsigned char>((len >> 16) & 0xff);
    header[2] = static_cast<unsigned char>((len >> 8) & 0xff);
    header[3] = static_cast<unsigned char>(len & 0xff);
    write_all(fd, reinterpret_cast<const char*>(header), 4);
    write_all(fd, body.data(), body.size());
}

std::string read_frame(int fd, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    unsigned char header[4];
    read_all(fd, reinterpret_cast<char*>(header), 4, deadline);
    const std::uint32_t len = (static_cast<std::uint32_t>(header[0]) << 24) |
                              (static_cast<std::uint32_t>(header[1]) << 16) |
                              (static_cast<std::uint32_t>(header[2]) << 8) |
                              static_cast<std::uint32_t>(header[3]);
    if (len > (1u << 26)) throw TransportError("frame too large");
    std::string body(len, '\0');
    read_all(fd, body.data(), len, deadline);
    return body;
}

TcpCoordinatorTransport::TcpCoordinatorTransport(int num_robots, int port)
    : sockets_(static_cast<std::size_t>(num_robots), -1) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw TransportError("cannot create listen socket");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw TransportError("cannot bind coordinator port");
    }
    socklen_t addr_len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &addr_len);
    port_ = ntohs(addr.sin_port);
    if (::listen(listen_fd_, num_robots) != 0) throw TransportError("listen failed");
}

TcpCoordinatorTransport::~TcpCoordinatorTransport() {
    for (int fd : sockets_) {
        if (fd >= 0) ::close(fd);
    }
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpCoordinatorTransport::accept_workers(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (std::size_t accepted = 0; accepted < sockets_.size(); ++accepted) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) throw TransportError("timed out waiting for workers");
        pollfd pfd{listen_fd_, POLLIN, 0};
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        const int rc = ::poll(&pfd, 1, static_cast<int>(remaining));
        if (rc <= 0) throw TransportError("timed out waiting for workers");
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) throw TransportError("accept failed");
        const std::string hello_text = read_frame(fd, timeout);
        const auto hello = nlohmann::json::parse(hello_text);
        if (hello.value("type", "") != "hello") throw TransportError("expected hello frame");
        const int robot = hello.at("robot").get<int>();
        if (robot < 0 || robot >= static_cast<int>(sockets_.size()) ||
            sockets_[static_cast<std::size_t>(robot)] >= 0) {
            ::close(fd);
            throw TransportError("bad hello robot id");
        }
        sockets_[static_cast<std::size_t>(robot)] = fd;
    }
}

void TcpCoordinatorTransport::send(int robot, const DmpcMessage& msg) {
    write_frame(sockets_.at(static_cast<std::size_t>(robot)), message_to_json(msg));
}

DmpcMessage TcpCoordinatorTransport::recv(int robot, std::chrono::milliseconds timeout) {
    return message_from_json(read_frame(sockets_.at(static_cast<std::size_t>(robot)), timeout));
}

TcpWorkerTransport::TcpWorkerTransport(const std::string& host, int port, int robot_id) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError("cannot create worker socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host == "localhost" ? "127.0.0.1" : host.c_str(), &addr.sin_addr) != 1) {
        throw TransportError("bad coordinator host");
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw TransportError("cannot connect to coordinator");
    }
    nlohmann::json hello = {{"type", "hello"}, {"robot", robot_id}};
    write_frame(fd_, hello.dump());
}

TcpWorkerTransport::~TcpWorkerTransport() {
    if (fd_ >= 0) ::close(fd_);
}

void TcpWorkerTransport::send(const DmpcMessage& msg) { write_frame(fd_, message_to_json(msg)); }

DmpcMessage TcpWorkerTransport::recv(std::chrono::milliseconds timeout) {
    return message_from_json(read_frame(fd_, timeout));
}

}  // namespace crowdgame
