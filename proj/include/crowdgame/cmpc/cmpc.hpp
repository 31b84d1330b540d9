#ifndef CROWDGAME_CMPC_CMPC_HPP
#define CROWDGAME_CMPC_CMPC_HPP

#include <vector>

#include "crowdgame/core/types.hpp"
#include "crowdgame/objectives/objectives.hpp"
#include "crowdgame/predictor/predictor.hpp"
#include "crowdgame/solver/solver.hpp"

namespace crowdgame {

struct CmpcIteration {
    int iteration = 0;
    double potential_value = 0.0;
    SolveReport solve;
};

struct CmpcResult {
    JointStrategy strategy;
    std::vector<CmpcIteration> trace;
    bool converged = false;
    PredictedCrowd final_prediction;
};

struct CmpcOptions {
    /// Return the last iterate even when a later one had a lower recorded
    /// potential (the literal loop exit). Off by default: when the outer
    /// loop cycles, the best recorded iterate is returned instead.
    bool strict_last_iterate = false;
    SolveOptions solver;
};

/// Best-response alternation between crowd prediction and the joint
/// minimization of the potential over all robots' stacked controls.
/// Predictions are recomputed each outer iteration from the previous
/// iteration's robot trajectories and held constant during the inner
/// solve. The loop stops once the potential changes by at most xi, or
/// after j_max iterations.
CmpcResult solve_cmpc(const std::vector<LocalContext>& robots, const PositionHistory& history,
                      const Predictor& predictor, const CostParams& params,
                      const JointStrategy& u_init, const CmpcOptions& options = {});

/// Accumulated deviation of a candidate crowd trajectory from the
/// predicted one: the sum over the horizon of the stacked 2-norm of the
/// per-step differences. Zero when the crowd follows the prediction.
double eval_interaction_cost(const PredictedCrowd& pred,
                             const std::vector<std::vector<Vec2>>& candidate);

}  // namespace crowdgame

#endif  // CROWDGAME_CMPC_CMPC_HPP
