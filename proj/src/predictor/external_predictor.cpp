#include "crowdgame/predictor/external_predictor.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

namespace crowdgame {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw PredictorProtocolError(what); }

int connect_socket(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port_str = std::to_string(port);
    if (getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res) != 0 || res == nullptr) {
        fail("external predictor: cannot resolve " + host + ":" + port_str);
    }
    int fd = -1;
    for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
        fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0) fail("external predictor: cannot connect to " + host + ":" + port_str);
    return fd;
}

}  // namespace

std::unique_ptr<ExternalPredictor> ExternalPredictor::connect_tcp(
    const std::string& host, int port, std::chrono::milliseconds timeout) {
    const int fd = connect_socket(host, port);
    return std::unique_ptr<ExternalPredictor>(new ExternalPredictor(fd, fd, -1, timeout));
}

std::unique_ptr<ExternalPredictor> ExternalPredictor::spawn(
    const std::string& command, std::chrono::milliseconds timeout) {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
        fail("external predictor: pipe() failed");
    }
    const pid_t pid = ::fork();
    if (pid < 0) fail("external predictor: fork() failed");
    if (pid == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::close(to_child[0]);
        ::close(to_child[1]);
        ::close(from_child[0]);
        ::close(from_child[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::unique_ptr<ExternalPredictor>(
        new ExternalPredictor(from_child[0], to_child[1], pid, timeout));
}

std::unique_ptr<ExternalPredictor> ExternalPredictor::open(
    const std::string& endpoint, std::chrono::milliseconds timeout) {
    if (endpoint.rfind("tcp:", 0) == 0) {
        const std::string rest = endpoint.substr(4);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos) fail("external predictor endpoint must be tcp:host:port");
        return connect_tcp(rest.substr(0, colon), std::stoi(rest.substr(colon + 1)), timeout);
    }
    if (endpoint.rfind("cmd:", 0) == 0) {
        return spawn(endpoint.substr(4), timeout);
    }
    fail("external predictor endpoint must start with tcp: or cmd:");
}

ExternalPredictor::ExternalPredictor(int read_fd, int write_fd, long child_pid,
                                     std::chrono::milliseconds timeout)
    : read_fd_(read_fd), write_fd_(write_fd), child_pid_(child_pid), timeout_(timeout) {}

ExternalPredictor::~ExternalPredictor() {
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (child_pid_ > 0) {
        ::kill(static_cast<pid_t>(child_pid_), SIGTERM);
        int status = 0;
        ::waitpid(static_cast<pid_t>(child_pid_), &status, 0);
    }
}

std::string ExternalPredictor::read_line(std::chrono::steady_clock::time_point deadline) const {
    for (;;) {
        const auto newline = pending_.find('\n');
        if (newline != std::string::npos) {
            std::string line = pending_.substr(0, newline);
            pending_.erase(0, newline + 1);
            return line;
        }
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) fail("external predictor: reply timed out");
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        pollfd pfd{read_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(remaining));
        if (rc == 0) fail("external predictor: reply timed out");
        if (rc < 0) {
            if (errno == EINTR) continue;
            fail("external predictor: poll() failed");
        }
        char buf[4096];
        const ssize_t n = ::read(read_fd_, buf, sizeof(buf));
        if (n == 0) fail("external predictor: connection closed");
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("external predictor: read() failed");
        }
        pending_.append(buf, static_cast<std::size_t>(n));
    }
}

std::string ExternalPredictor::exchange(const std::string& request_line) const {
    std::size_t written = 0;
    while (written < request_line.size()) {
        const ssize_t n =
            ::write(write_fd_, request_line.data() + written, request_line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("external predictor: write() failed");
        }
        written += static_cast<std::size_t>(n);
    }
    return read_line(std::chrono::steady_clock::now() + timeout_);
}

std::vector<Vec2> ExternalPredictor::predict_step(const PositionHistory& history,
                                                  int num_humans) const {
    json hist = json::array();
    for (int k = 0; k < history.size(); ++k) {
        json slice = json::array();
        for (const auto& p : history.slice(k)) slice.push_back(json::array({p.x(), p.y()}));
        hist.push_back(std::move(slice));
    }
    const json request = {{"history", std::move(hist)}, {"num_humans", num_humans}};
    const std::string request_line = request.dump() + "\n";

    std::lock_guard<std::mutex> lock(io_mutex_);
    std::string reply_line;
    if (const auto cached = cache_.find(request_line); cached != cache_.end()) {
        reply_line = cached->second;
    } else {
        reply_line = exchange(request_line);
        cache_.emplace(request_line, reply_line);
    }

    json reply;
    try {
        reply = json::parse(reply_line);
    } catch (const json::parse_error&) {
        fail("external predictor: reply is not valid JSON");
    }
    if (!reply.is_object() || !reply.contains("positions") || !reply["positions"].is_array()) {
        fail("external predictor: reply lacks a positions array");
    }
    const auto& positions = reply["positions"];
    if (static_cast<int>(positions.size()) != num_humans) {
        fail("external predictor: got " + std::to_string(positions.size()) +
             " positions, expected " + std::to_string(num_humans));
    }
    std::vector<Vec2> out;
    out.reserve(positions.size());
    for (const auto& p : positions) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            fail("external predictor: positions entries must be [x, y]");
        }
        const Vec2 v(p[0].get<double>(), p[1].get<double>());
        if (!v.allFinite()) fail("external predictor: non-finite position");
        out.push_back(v);
    }
    return out;
}

}  // namespace crowdgame
