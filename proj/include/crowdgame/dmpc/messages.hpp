#ifndef CROWDGAME_DMPC_MESSAGES_HPP
#define CROWDGAME_DMPC_MESSAGES_HPP

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "crowdgame/core/types.hpp"
#include "crowdgame/predictor/predictor.hpp"

namespace crowdgame {

/// Coordinator -> workers: the crowd prediction for this iteration.
struct PredictionBroadcast {
    int iter = 0;
    PredictedCrowd pred;
};

/// Worker -> coordinator: accepted strategy and its horizon positions.
struct BestResponse {
    int iter = 0;
    int robot = 0;
    std::vector<Vec2> trajectory;
    Strategy strategy;
};

/// Coordinator -> worker `robot`: the other robots' current trajectories.
struct NeighborUpdate {
    int iter = 0;
    int robot = 0;
    std::vector<std::pair<int, std::vector<Vec2>>> neighbors;
};

/// Worker -> coordinator: epsilon-convergence verdict after the exchange.
struct ConvFlag {
    int iter = 0;
    int robot = 0;
    bool converged = false;
};

/// Coordinator -> workers: final joint strategy; ends the session.
struct Terminate {
    int iter = 0;
    JointStrategy strategy;
};

/// Worker -> coordinator: unrecoverable local failure; aborts the episode.
struct WorkerError {
    int iter = 0;
    int robot = 0;
    std::string message;
};

using DmpcMessage = std::variant<PredictionBroadcast, BestResponse, NeighborUpdate, ConvFlag,
                                 Terminate, WorkerError>;

/// Wire form: {"type": ..., "iter": ..., "robot": ..., "payload": {...}}.
std::string message_to_json(const DmpcMessage& msg);
DmpcMessage message_from_json(const std::string& text);

const char* message_type_name(const DmpcMessage& msg);

}  // namespace crowdgame

#endif  // CROWDGAME_DMPC_MESSAGES_HPP
