#ifndef CROWDGAME_DMPC_DMPC_HPP
#define CROWDGAME_DMPC_DMPC_HPP

#include <chrono>
#include <optional>
#include <vector>

#include "crowdgame/core/types.hpp"
#include "crowdgame/dmpc/messages.hpp"
#include "crowdgame/dmpc/transport.hpp"
#include "crowdgame/objectives/objectives.hpp"
#include "crowdgame/predictor/predictor.hpp"
#include "crowdgame/solver/solver.hpp"

namespace crowdgame {

/// One robot's half of the best-response protocol, as a reactive state
/// machine. On a prediction broadcast it solves its local MPC against the
/// neighbors' previous trajectories, keeps the new strategy only when it
/// improves its cost by more than epsilon, and answers with the result.
/// On a neighbor update it re-evaluates the epsilon-convergence test and
/// answers with its flag.
class RobotWorkerCore {
public:
    RobotWorkerCore(int id, LocalContext ctx, Strategy initial_strategy,
                    CostParams params, SolveOptions solver = {});

    std::vector<DmpcMessage> on_message(const DmpcMessage& msg);
    bool terminated() const { return terminated_; }
    int id() const { return id_; }

private:
    std::vector<Vec2> own_positions(const Strategy& strat) const;
    double cost_of(const Strategy& strat) const;

    int id_;
    LocalContext ctx_;
    CostParams params_;
    SolveOptions solver_;

    Strategy previous_;   // u_i^(j-1)
    Strategy current_;    // u_i^(j)
    PredictedCrowd pred_;
    std::vector<std::vector<Vec2>> neighbor_positions_;  // indexed by robot id; own slot unused
    int last_iter_ = 0;
    bool terminated_ = false;
};

/// Runs the worker loop over a transport until Terminate arrives.
void run_robot_worker(RobotWorkerCore& core, WorkerTransport& transport,
                      std::chrono::milliseconds idle_timeout = std::chrono::seconds(60));

struct DmpcIterationTrace {
    int iteration = 0;
    std::vector<double> player_costs;
    std::vector<bool> conv_flags;
    double potential_value = 0.0;
};

struct DmpcResult {
    JointStrategy strategy;
    std::vector<DmpcIterationTrace> trace;
    bool converged = false;
    PredictedCrowd final_prediction;
};

struct DmpcOptions {
    std::chrono::milliseconds worker_timeout = std::chrono::seconds(5);
    SolveOptions solver;
};

/// Coordinator side of the distributed best-response loop. Per iteration:
/// predict the crowd from the previous trajectories, broadcast, collect
/// every robot's best response, redistribute the trajectories, collect
/// the convergence flags, and stop once all flags are true or j_max is
/// reached. Workers must already be attached to the transport.
DmpcResult run_coordinator(const std::vector<LocalContext>& robots,
                           const PositionHistory& history, const Predictor& predictor,
                           const CostParams& params, const JointStrategy& u_init,
                           CoordinatorTransport& transport, const DmpcOptions& options = {});

/// Convenience wrapper: hosts the workers on an in-process single-threaded
/// transport and runs the coordinator against them.
DmpcResult solve_dmpc(const std::vector<LocalContext>& robots, const PositionHistory& history,
                      const Predictor& predictor, const CostParams& params,
                      const JointStrategy& u_init, const DmpcOptions& options = {});

/// Same protocol over loopback TCP frames: binds a coordinator socket
/// (port 0 picks an ephemeral port), spawns one worker thread per robot,
/// and runs the exchange over real sockets.
DmpcResult solve_dmpc_tcp(const std::vector<LocalContext>& robots,
                          const PositionHistory& history, const Predictor& predictor,
                          const CostParams& params, const JointStrategy& u_init, int port,
                          const DmpcOptions& options = {});

}  // namespace crowdgame

#endif  // CROWDGAME_DMPC_DMPC_HPP
