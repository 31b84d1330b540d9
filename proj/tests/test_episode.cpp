#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "crowdgame/harness/harness.hpp"
#include "crowdgame/sim/episode.hpp"

using namespace crowdgame;

TEST_CASE("empty crowd reduces to pure robot dynamics") {
    Scenario scenario;
    scenario.robots.push_back(RobotSpec{Vec2(0, 0), Vec2(1.0, 0.0), Vec2(10, 0)});
    const CostParams params = CostParams::defaults(1);
    World world = make_world(scenario, params);

    const auto rec = step_episode(world, {Vec2(0.0, 0.0)}, 0.4);
    CHECK(rec.robot_pos[0].x() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(world.history.newest()[0].x() == doctest::Approx(0.4));
}

TEST_CASE("free pedestrians walk at preferred speed toward their goals") {
    Scenario scenario;
    scenario.humans.push_back(HumanSpec{Vec2(0, 0), Vec2(10, 0), 0.3, 1.0});
    scenario.humans.push_back(HumanSpec{Vec2(0, 50), Vec2(10, 50), 0.3, 1.0});
    const CostParams params = CostParams::defaults(0);
    World world = make_world(scenario, params);
    const auto rec = step_episode(world, {}, 0.4);
    CHECK(rec.human_vel[0].x() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rec.human_pos[0].x() == doctest::Approx(0.4).epsilon(1e-4));
}

TEST_CASE("full episode is reproducible bit-exactly") {
    const Scenario scenario = gen_circular(9, 3, 5);
    const CostParams params = CostParams::defaults(3);
    EpisodeOptions options;
    const SimRecord a = run_episode(scenario, params, ConstantVelocityPredictor{}, options);
    const SimRecord b = run_episode(scenario, params, ConstantVelocityPredictor{}, options);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        for (std::size_t i = 0; i < a.steps[k].robot_pos.size(); ++i) {
            CHECK((a.steps[k].robot_pos[i] - b.steps[k].robot_pos[i]).norm() == 0.0);
            CHECK((a.steps[k].robot_vel[i] - b.steps[k].robot_vel[i]).norm() == 0.0);
        }
        for (std::size_t h = 0; h < a.steps[k].human_pos.size(); ++h) {
            CHECK((a.steps[k].human_pos[h] - b.steps[k].human_pos[h]).norm() == 0.0);
        }
        CHECK(a.steps[k].ibr_iterations == b.steps[k].ibr_iterations);
    }
}

TEST_CASE("single robot crosses an empty room in about the straight-line time") {
    Scenario scenario;
    scenario.robots.push_back(RobotSpec{Vec2(-2, 0), Vec2(0, 0), Vec2(2, 0)});
    const CostParams params = CostParams::defaults(1);
    const SimRecord rec = run_episode(scenario, params, ConstantVelocityPredictor{}, {});
    const EpisodeResult result = evaluate_episode(rec, params);
    CHECK(result.success);
    // 4 m at <= 1 m/s with a 0.3 m arrival disc: roughly 4 s.
    CHECK(result.travel_time > 2.0);
    CHECK(result.travel_time < 7.0);
    CHECK_FALSE(result.collision);
}

TEST_CASE("trajectory log round-trips") {
    const Scenario scenario = gen_circular(4, 1, 2);
    const CostParams params = CostParams::defaults(1);
    const SimRecord rec = run_episode(scenario, params, ConstantVelocityPredictor{}, {});

    const std::string path = "episode_roundtrip.jsonl";
    write_trajectory_log(rec, path);
    const SimRecord back = read_trajectory_log(path);
    REQUIRE(back.steps.size() == rec.steps.size());
    CHECK(back.tau == rec.tau);
    CHECK(back.num_robots == rec.num_robots);
    CHECK((back.robot_goals[0] - rec.robot_goals[0]).norm() == 0.0);
    for (std::size_t k = 0; k < rec.steps.size(); ++k) {
        CHECK((back.steps[k].robot_pos[0] - rec.steps[k].robot_pos[0]).norm() == 0.0);
        CHECK((back.steps[k].human_pos[1] - rec.steps[k].human_pos[1]).norm() == 0.0);
    }
    std::remove(path.c_str());

    SUBCASE("log bytes are deterministic") {
        write_trajectory_log(rec, "log_a.jsonl");
        write_trajectory_log(rec, "log_b.jsonl");
        std::ifstream fa("log_a.jsonl"), fb("log_b.jsonl");
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        CHECK(sa.str() == sb.str());
        std::remove("log_a.jsonl");
        std::remove("log_b.jsonl");
    }
}

TEST_CASE("dmpc episodes run and are deterministic") {
    const Scenario scenario = gen_circular(21, 2, 3);
    const CostParams params = CostParams::defaults(2);
    EpisodeOptions options;
    options.method = Method::Dmpc;
    const SimRecord a = run_episode(scenario, params, ConstantVelocityPredictor{}, options);
    const SimRecord b = run_episode(scenario, params, ConstantVelocityPredictor{}, options);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        for (std::size_t i = 0; i < a.steps[k].robot_pos.size(); ++i) {
            CHECK((a.steps[k].robot_pos[i] - b.steps[k].robot_pos[i]).norm() == 0.0);
        }
    }
}
