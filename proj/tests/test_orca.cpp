#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crowdgame/harness/harness.hpp"
#include "crowdgame/sim/episode.hpp"
#include "crowdgame/sim/orca.hpp"

using namespace crowdgame;

TEST_CASE("lone agent moves at its preferred velocity") {
    OrcaAgent agent;
    agent.position = Vec2(0.0, 0.0);
    agent.goal = Vec2(10.0, 0.0);
    const auto velocities = orca_step({agent}, {}, 0.4);
    REQUIRE(velocities.size() == 1);
    CHECK(velocities[0].x() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(velocities[0].y()) < 1e-5);
}

TEST_CASE("agent at its goal stays put") {
    OrcaAgent agent;
    agent.position = Vec2(3.0, 3.0);
    agent.goal = Vec2(3.0, 3.0);
    const auto velocities = orca_step({agent}, {}, 0.4);
    CHECK(velocities[0].norm() < 1e-9);
}

TEST_CASE("exact head-on pair dodges mirror-symmetrically") {
    OrcaAgent a;
    a.position = Vec2(-2.0, 0.0);
    a.goal = Vec2(2.0, 0.0);
    a.velocity = Vec2(1.0, 0.0);
    OrcaAgent b;
    b.position = Vec2(2.0, 0.0);
    b.goal = Vec2(-2.0, 0.0);
    b.velocity = Vec2(-1.0, 0.0);

    const auto velocities = orca_step({a, b}, {}, 0.4);
    // Point symmetry through the origin, lateral components nonzero and
    // equal in magnitude thanks to the deterministic tie-break.
    CHECK((velocities[0] + velocities[1]).norm() < 1e-9);
    CHECK(std::abs(velocities[0].y()) > 1e-9);
    CHECK(std::abs(velocities[0].y()) == doctest::Approx(std::abs(velocities[1].y())));
}

TEST_CASE("output speed never exceeds the cap") {
    OrcaAgent a;
    a.position = Vec2(-0.35, 0.0);
    a.goal = Vec2(5.0, 0.0);
    a.velocity = Vec2(1.0, 0.0);
    OrcaAgent b = a;
    b.position = Vec2(0.35, 0.0);
    b.goal = Vec2(-5.0, 0.0);
    b.velocity = Vec2(-1.0, 0.0);
    const auto velocities = orca_step({a, b}, {}, 0.4);
    for (const auto& v : velocities) CHECK(v.norm() <= a.max_speed + 1e-9);
}

TEST_CASE("robots are avoided with full responsibility") {
    OrcaAgent human;
    human.position = Vec2(0.0, 0.0);
    human.goal = Vec2(4.0, 0.0);
    human.velocity = Vec2(1.0, 0.0);

    OrcaObstacle robot;
    robot.position = Vec2(2.0, 0.0);
    robot.velocity = Vec2(-1.0, 0.0);

    const auto velocities = orca_step({human}, {robot}, 0.4);
    // The human gives way: its velocity is no longer straight at the goal.
    CHECK((velocities[0] - Vec2(1.0, 0.0)).norm() > 1e-3);
}

TEST_CASE("half-plane normals are unit length") {
    OrcaAgent agent;
    agent.position = Vec2(0.0, 0.0);
    agent.velocity = Vec2(0.7, 0.1);
    HalfPlane plane;
    REQUIRE(orca_half_plane(agent, Vec2(1.0, 0.4), Vec2(-0.5, 0.0), 0.3, 0.5, 0.4, plane));
    CHECK(std::abs(plane.normal.norm() - 1.0) < 1e-9);

    SUBCASE("neighbors beyond the neighbor distance are skipped") {
        CHECK_FALSE(orca_half_plane(agent, Vec2(50.0, 0.0), Vec2::Zero(), 0.3, 0.5, 0.4, plane));
    }
}

TEST_CASE("overlapping agents separate") {
    OrcaAgent a;
    a.position = Vec2(0.0, 0.0);
    a.goal = Vec2(0.0, 0.0);
    OrcaAgent b = a;
    b.position = Vec2(0.2, 0.0);  // overlap: radii sum to 0.6
    b.goal = Vec2(0.2, 0.0);
    const auto velocities = orca_step({a, b}, {}, 0.4);
    // Relative velocity pushes them apart along the x axis.
    CHECK(velocities[1].x() - velocities[0].x() > 0.1);
}

TEST_CASE("pedestrian-only circle crossing has no interpenetration") {
    const Scenario scenario = gen_circular(12345, 0, 10);
    const CostParams params = CostParams::defaults(0);
    const SimRecord rec = run_episode(scenario, params, ConstantVelocityPredictor{}, {});
    REQUIRE(rec.steps.size() > 10);
    double min_gap = 1e9;
    for (const auto& step : rec.steps) {
        for (std::size_t i = 0; i < step.human_pos.size(); ++i) {
            for (std::size_t j = i + 1; j < step.human_pos.size(); ++j) {
                const double d = (step.human_pos[i] - step.human_pos[j]).norm();
                min_gap = std::min(min_gap, d - (scenario.humans[i].radius +
                                                 scenario.humans[j].radius));
            }
        }
    }
    CHECK(min_gap > -1e-6);
}

TEST_CASE("crowd stepping is deterministic") {
    const Scenario scenario = gen_circular(77, 0, 8);
    const CostParams params = CostParams::defaults(0);
    const SimRecord a = run_episode(scenario, params, ConstantVelocityPredictor{}, {});
    const SimRecord b = run_episode(scenario, params, ConstantVelocityPredictor{}, {});
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        for (std::size_t h = 0; h < a.steps[k].human_pos.size(); ++h) {
            CHECK((a.steps[k].human_pos[h] - b.steps[k].human_pos[h]).norm() == 0.0);
        }
    }
}
