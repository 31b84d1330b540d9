#ifndef CROWDGAME_HARNESS_HARNESS_HPP
#define CROWDGAME_HARNESS_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdgame/core/types.hpp"
#include "crowdgame/sim/episode.hpp"

namespace crowdgame {

/// Agents on a circle with antipodal goals; positions perturbed up to
/// 0.5 m tangentially and radially, resampled until every pair starts at
/// least d_min apart. Robots take the first M slots.
Scenario gen_circular(std::uint64_t seed, int num_robots, int num_humans, double radius = 4.0,
                      double d_min = 0.8);

/// Robots start abreast on the left and cross to the right; pedestrians
/// cross the corridor vertically. Same spacing rejection rule.
Scenario gen_perpendicular(std::uint64_t seed, int num_robots, int num_humans,
                           double d_min = 0.8, double robot_spacing = 1.2);

Scenario gen_layout(Layout layout, std::uint64_t seed, int num_robots, int num_humans,
                    double d_min = 0.8);

/// Episode verdicts derived from a SimRecord.
struct EpisodeResult {
    bool success = false;
    double travel_time = 0.0;   // valid only when success
    bool collision = false;
    bool discomfort = false;
    double min_robot_human_distance = std::numeric_limits<double>::infinity();
    std::vector<int> ibr_iterations;  // one entry per MPC step
    double mean_ibr_iterations = 0.0;
};

/// True iff every robot enters its goal disc within the time limit.
bool metric_success(const SimRecord& rec, double t_max);

/// First time at which the last robot has arrived; empty when some robot
/// never arrives.
std::optional<double> metric_travel_time(const SimRecord& rec);

/// True iff some robot-human center distance drops below 0.8 m.
bool metric_collision(const SimRecord& rec);

/// True iff the velocity-projected segments of a robot and a human
/// intersect at any recorded step. Segments run from the position along
/// the velocity for `factor` seconds, endpoints inclusive.
bool metric_discomfort(const SimRecord& rec, double factor = 1.2);

EpisodeResult evaluate_episode(const SimRecord& rec, const CostParams& params);

/// Inclusive 2-D segment intersection (shared by the discomfort metric).
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

enum class PredictorKind { ConstantVelocity, Social };

struct BatchConfig {
    CostParams params;
    int num_robots = 3;
    int num_humans = 5;
    int episodes = 100;             // split evenly across the two layouts
    Method method = Method::Cmpc;
    bool flocking = true;           // off = omega_floc zeroed, nothing else
    PredictorKind predictor = PredictorKind::ConstantVelocity;
    std::uint64_t seed_base = 1;
    int parallelism = 0;            // 0 = number of hardware threads
};

struct EpisodeRow {
    Method method;
    Layout layout;
    std::uint64_t seed;
    EpisodeResult result;
};

struct LayoutSummary {
    int episodes = 0;
    int successes = 0;
    double success_rate = 0.0;       // percent
    double avg_travel_time = 0.0;    // successes only
    double collision_rate = 0.0;     // percent
    double discomfort_rate = 0.0;    // percent
    double mean_ibr_iterations = 0.0;
};

struct BatchSummary {
    LayoutSummary circular;
    LayoutSummary perpendicular;
    LayoutSummary overall;
    int episodes = 0;
    std::string config_fingerprint;
    std::vector<EpisodeRow> rows;
};

LayoutSummary summarize(const std::vector<EpisodeRow>& rows);

/// Monte-Carlo batch: episodes split evenly across the circular and
/// perpendicular layouts, seeds seed_base..seed_base+episodes-1.
/// Deterministic given the seed list; episodes may run in parallel.
BatchSummary run_batch(const BatchConfig& config);

std::string batch_csv(const BatchSummary& summary);
std::string batch_summary_json(const BatchSummary& summary);
void write_batch_outputs(const BatchSummary& summary, const std::string& out_dir,
                         const std::string& tag);

}  // namespace crowdgame

#endif  // CROWDGAME_HARNESS_HARNESS_HPP
