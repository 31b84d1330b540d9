#ifndef CROWDGAME_PREDICTOR_EXTERNAL_PREDICTOR_HPP
#define CROWDGAME_PREDICTOR_EXTERNAL_PREDICTOR_HPP

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "crowdgame/predictor/predictor.hpp"

namespace crowdgame {

struct PredictorProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bridge to an out-of-process predictor speaking line-delimited UTF-8
/// JSON: request {"history": [[[x,y], ...N], ...L], "num_humans": n},
/// reply {"positions": [[x,y], ...n]}. One request in flight at a time.
///
/// Protocol violations, arity mismatches and timeouts all raise
/// PredictorProtocolError; there is no silent fallback. Replies are
/// cached by request payload, which keeps repeated queries for the same
/// window deterministic within a solve.
class ExternalPredictor final : public Predictor {
public:
    /// Connects to a TCP endpoint ("host:port").
    static std::unique_ptr<ExternalPredictor> connect_tcp(
        const std::string& host, int port,
        std::chrono::milliseconds timeout = std::chrono::milliseconds(200));

    /// Spawns `command` via /bin/sh and speaks the protocol on its stdio.
    static std::unique_ptr<ExternalPredictor> spawn(
        const std::string& command,
        std::chrono::milliseconds timeout = std::chrono::milliseconds(200));

    /// Parses "tcp:host:port" or "cmd:shell command".
    static std::unique_ptr<ExternalPredictor> open(
        const std::string& endpoint,
        std::chrono::milliseconds timeout = std::chrono::milliseconds(200));

    ~ExternalPredictor() override;
    ExternalPredictor(const ExternalPredictor&) = delete;
    ExternalPredictor& operator=(const ExternalPredictor&) = delete;

    std::vector<Vec2> predict_step(const PositionHistory& history,
                                   int num_humans) const override;

private:
    ExternalPredictor(int read_fd, int write_fd, long child_pid,
                      std::chrono::milliseconds timeout);

    std::string exchange(const std::string& request_line) const;
    std::string read_line(std::chrono::steady_clock::time_point deadline) const;

    int read_fd_ = -1;
    int write_fd_ = -1;
    long child_pid_ = -1;
    std::chrono::milliseconds timeout_;
    mutable std::mutex io_mutex_;
    mutable std::string pending_;
    mutable std::map<std::string, std::string> cache_;
};

}  // namespace crowdgame

#endif  // CROWDGAME_PREDICTOR_EXTERNAL_PREDICTOR_HPP
