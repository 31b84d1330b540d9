#ifndef CROWDGAME_PREDICTOR_PREDICTOR_HPP
#define CROWDGAME_PREDICTOR_PREDICTOR_HPP

#include <memory>
#include <vector>

#include "crowdgame/core/types.hpp"

namespace crowdgame {

/// Predicted human positions over the control horizon, slices t+1..t+H.
struct PredictedCrowd {
    std::vector<std::vector<Vec2>> slices;

    int horizon() const { return static_cast<int>(slices.size()); }
    int num_humans() const { return slices.empty() ? 0 : static_cast<int>(slices.front().size()); }
    const Vec2& human(int step, int human_index) const {
        return slices.at(static_cast<std::size_t>(step)).at(static_cast<std::size_t>(human_index));
    }
};

/// Single-step human-motion predictor. Given a full observation window of
/// all agents, returns the next position of the `num_humans` trailing
/// agents. Implementations must be deterministic in the history.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::vector<Vec2> predict_step(const PositionHistory& history,
                                           int num_humans) const = 0;
};

/// Recursive horizon prediction: after each single-step call, a synthetic
/// slice is appended to the window whose robot entries come from the
/// planned robot trajectories and whose human entries are the predictions
/// just made. `robot_plan` holds one H-step position sequence per robot.
PredictedCrowd rollout_prediction(const Predictor& predictor, PositionHistory history,
                                  const std::vector<std::vector<Vec2>>& robot_plan,
                                  int horizon);

/// Linear extrapolation from the last two observed positions.
class ConstantVelocityPredictor final : public Predictor {
public:
    std::vector<Vec2> predict_step(const PositionHistory& history,
                                   int num_humans) const override;
};

/// Constant-velocity extrapolation plus a bounded repulsive displacement
/// away from every other agent closer than `radius`. The per-neighbor
/// magnitude is gain*(1 - d/radius)*tau and the total step is clamped to
/// v_max*tau.
class SocialPredictor final : public Predictor {
public:
    SocialPredictor(double gain, double radius, double tau, double v_max);

    std::vector<Vec2> predict_step(const PositionHistory& history,
                                   int num_humans) const override;

private:
    double gain_;
    double radius_;
    double tau_;
    double v_max_;
};

}  // namespace crowdgame

#endif  // CROWDGAME_PREDICTOR_PREDICTOR_HPP
