// Out-of-process predictor used by the external-predictor tests.
// Speaks the line-delimited JSON protocol on stdio or a TCP socket.
//
// Modes:
//   echo       reply with the last observed human positions
//   shift      reply with the last positions shifted by +0.1 on x
//   malformed  reply with text that is not valid JSON
//   short      reply with one position fewer than requested
//   slow       sleep 2 s before an echo reply (forces client timeouts)

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

using nlohmann::json;

namespace {

std::string respond(const std::string& mode, const std::string& line) {
    const json request = json::parse(line);
    const auto& history = request.at("history");
    const int num_humans = request.at("num_humans").get<int>();
    const auto& last = history.back();
    const int total = static_cast<int>(last.size());

    if (mode == "malformed") return "this is not json";
    if (mode == "slow") std::this_thread::sleep_for(std::chrono::seconds(2));

    json positions = json::array();
    const int count = mode == "short" ? num_humans - 1 : num_humans;
    for (int h = 0; h < count; ++h) {
        const auto& p = last.at(static_cast<std::size_t>(total - num_humans + h));
        double x = p.at(0).get<double>();
        const double y = p.at(1).get<double>();
        if (mode == "shift") x += 0.1;
        positions.push_back(json::array({x, y}));
    }
    return json{{"positions", positions}}.dump();
}

int serve_stream(const std::string& mode, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out << respond(mode, line) << "\n" << std::flush;
    }
    return 0;
}

int serve_tcp(const std::string& mode) {
    const int listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) return 1;
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ::listen(listen_fd, 1);
    // Parent test reads the chosen port from stdout.
    std::cout << ntohs(addr.sin_port) << std::endl;

    const int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd < 0) return 1;
    std::string buffer;
    char chunk[4096];
    for (;;) {
        const ssize_t n = ::read(fd, chunk, sizeof(chunk));
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        for (;;) {
            const auto newline = buffer.find('\n');
            if (newline == std::string::npos) break;
            const std::string line = buffer.substr(0, newline);
            buffer.erase(0, newline + 1);
            const std::string reply = respond(mode, line) + "\n";
            if (::write(fd, reply.data(), reply.size()) < 0) break;
        }
    }
    ::close(fd);
    ::close(listen_fd);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::string mode = "echo";
    bool tcp = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--tcp") == 0) {
            tcp = true;
        } else {
            mode = argv[i];
        }
    }
    return tcp ? serve_tcp(mode) : serve_stream(mode, std::cin, std::cout);
}
