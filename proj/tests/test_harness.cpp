#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "crowdgame/harness/harness.hpp"

using namespace crowdgame;

TEST_CASE("circular generation is deterministic and well spaced") {
    const Scenario a = gen_circular(42, 3, 5);
    const Scenario b = gen_circular(42, 3, 5);
    REQUIRE(a.robots.size() == 3);
    REQUIRE(a.humans.size() == 5);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK((a.robots[i].position - b.robots[i].position).norm() == 0.0);
        CHECK((a.robots[i].goal + a.robots[i].position).norm() < 1e-12);  // antipodal
    }

    SUBCASE("spacing holds over many seeds") {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const Scenario s = gen_circular(seed, 3, 6);
            std::vector<Vec2> starts;
            for (const auto& r : s.robots) starts.push_back(r.position);
            for (const auto& h : s.humans) starts.push_back(h.position);
            for (std::size_t i = 0; i < starts.size(); ++i) {
                for (std::size_t j = i + 1; j < starts.size(); ++j) {
                    CHECK((starts[i] - starts[j]).norm() >= 0.8);
                }
            }
        }
    }
    SUBCASE("pedestrian-only generation is allowed") {
        const Scenario s = gen_circular(7, 0, 10);
        CHECK(s.num_robots() == 0);
        CHECK(s.num_humans() == 10);
    }
}

TEST_CASE("perpendicular generation crosses the corridor") {
    const Scenario s = gen_perpendicular(11, 3, 5);
    REQUIRE(s.robots.size() == 3);
    for (const auto& r : s.robots) {
        CHECK(r.position.x() == doctest::Approx(-4.0));
        CHECK(r.goal.x() == doctest::Approx(4.0));
    }
    for (const auto& h : s.humans) {
        CHECK(h.position.y() * h.goal.y() < 0.0);  // opposite sides
    }
    SUBCASE("deterministic and spaced") {
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            const Scenario t = gen_perpendicular(seed, 3, 7);
            std::vector<Vec2> starts;
            for (const auto& r : t.robots) starts.push_back(r.position);
            for (const auto& h : t.humans) starts.push_back(h.position);
            for (std::size_t i = 0; i < starts.size(); ++i) {
                for (std::size_t j = i + 1; j < starts.size(); ++j) {
                    CHECK((starts[i] - starts[j]).norm() >= 0.8);
                }
            }
        }
    }
}

namespace {

SimRecord two_step_record() {
    SimRecord rec;
    rec.tau = 0.4;
    rec.num_robots = 1;
    rec.robot_goals = {Vec2(1.0, 0.0)};
    StepRecord s0;
    s0.time = 0.0;
    s0.robot_pos = {Vec2(0.0, 0.0)};
    s0.robot_vel = {Vec2(0.0, 0.0)};
    StepRecord s1 = s0;
    s1.time = 0.4;
    rec.steps = {s0, s1};
    return rec;
}

}  // namespace

TEST_CASE("success and travel-time metrics") {
    SUBCASE("robot spawned at its goal succeeds at time zero") {
        SimRecord rec = two_step_record();
        rec.robot_goals = {Vec2(0.0, 0.0)};
        CHECK(metric_success(rec, 25.0));
        CHECK(metric_travel_time(rec).value() == doctest::Approx(0.0));
    }
    SUBCASE("never-arriving robot fails and has no travel time") {
        const SimRecord rec = two_step_record();
        CHECK_FALSE(metric_success(rec, 25.0));
        CHECK_FALSE(metric_travel_time(rec).has_value());
    }
    SUBCASE("arrival after the deadline is a failure") {
        SimRecord rec = two_step_record();
        rec.steps[1].robot_pos[0] = Vec2(1.0, 0.0);
        rec.steps[1].time = 30.0;
        CHECK_FALSE(metric_success(rec, 25.0));
        CHECK(metric_travel_time(rec).value() == doctest::Approx(30.0));
    }
}

TEST_CASE("collision metric uses the 0.8 m personal space") {
    SimRecord rec = two_step_record();
    rec.steps[0].min_robot_human_distance = 0.81;
    rec.steps[1].min_robot_human_distance = 0.81;
    CHECK_FALSE(metric_collision(rec));
    rec.steps[1].min_robot_human_distance = 0.79;
    CHECK(metric_collision(rec));

    SUBCASE("empty crowd never collides") {
        const SimRecord empty = two_step_record();
        CHECK_FALSE(metric_collision(empty));
    }
}

TEST_CASE("discomfort metric intersects projected paths") {
    SimRecord rec = two_step_record();
    rec.steps.resize(1);
    auto& step = rec.steps[0];

    SUBCASE("parallel non-overlapping paths are fine") {
        step.human_pos = {Vec2(0.0, 1.0)};
        step.human_vel = {Vec2(1.0, 0.0)};
        step.robot_vel = {Vec2(1.0, 0.0)};
        CHECK_FALSE(metric_discomfort(rec));
    }
    SUBCASE("crossing projections are discomfort") {
        step.robot_pos = {Vec2(0.0, 0.0)};
        step.robot_vel = {Vec2(1.0, 0.0)};
        step.human_pos = {Vec2(0.6, -0.6)};
        step.human_vel = {Vec2(0.0, 1.0)};
        // Segments (0,0)-(1.2,0) and (0.6,-0.6)-(0.6,0.6) cross at (0.6,0).
        CHECK(metric_discomfort(rec));
    }
    SUBCASE("stationary pair of points only collides when coincident") {
        step.robot_pos = {Vec2(0.0, 0.0)};
        step.robot_vel = {Vec2(0.0, 0.0)};
        step.human_pos = {Vec2(0.5, 0.0)};
        step.human_vel = {Vec2(0.0, 0.0)};
        CHECK_FALSE(metric_discomfort(rec));
        step.human_pos = {Vec2(0.0, 0.0)};
        CHECK(metric_discomfort(rec));
    }
}

TEST_CASE("segment intersection handles endpoints and collinearity") {
    CHECK(segments_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(1, 1)));   // shared endpoint
    CHECK(segments_intersect(Vec2(0, 0), Vec2(2, 0), Vec2(1, 0), Vec2(3, 0)));   // collinear overlap
    CHECK_FALSE(segments_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0)));
    CHECK_FALSE(segments_intersect(Vec2(0, 0), Vec2(1, 1), Vec2(2, 0), Vec2(3, -5)));
}

TEST_CASE("small batch without humans succeeds everywhere") {
    BatchConfig config;
    config.params = CostParams::defaults(2);
    config.num_robots = 2;
    config.num_humans = 0;
    config.episodes = 10;
    config.parallelism = 2;
    const BatchSummary summary = run_batch(config);
    CHECK(summary.overall.success_rate == doctest::Approx(100.0));
    CHECK(summary.overall.collision_rate == doctest::Approx(0.0));
    CHECK(summary.rows.size() == 10);
    CHECK(summary.circular.episodes == 5);
    CHECK(summary.perpendicular.episodes == 5);
}

TEST_CASE("identical batches produce identical CSV bytes") {
    BatchConfig config;
    config.params = CostParams::defaults(1);
    config.num_robots = 1;
    config.num_humans = 2;
    config.episodes = 6;
    config.parallelism = 2;
    const std::string a = batch_csv(run_batch(config));
    const std::string b = batch_csv(run_batch(config));
    CHECK(a == b);
    CHECK(a.rfind("method,layout,seed,success,travel_time,collision,discomfort,mean_ibr_iters\n",
                  0) == 0);
}

TEST_CASE("flocking off only zeroes the flocking weights") {
    BatchConfig config;
    config.params = CostParams::defaults(2);
    config.num_robots = 2;
    config.num_humans = 0;
    config.episodes = 2;
    config.flocking = false;
    const BatchSummary summary = run_batch(config);
    CHECK(summary.rows.size() == 2);
    // The original params object is untouched.
    CHECK(config.params.omega_floc(0, 1) == doctest::Approx(10.0));
}

TEST_CASE("aggregation is permutation-invariant") {
    std::vector<EpisodeRow> rows;
    for (int i = 0; i < 7; ++i) {
        EpisodeRow row;
        row.method = Method::Cmpc;
        row.layout = Layout::CircularCrossing;
        row.seed = static_cast<std::uint64_t>(i);
        row.result.success = i % 2 == 0;
        row.result.travel_time = 10.0 + i;
        row.result.collision = i == 3;
        row.result.discomfort = i == 5;
        row.result.mean_ibr_iterations = 2.0;
        rows.push_back(row);
    }
    const LayoutSummary a = summarize(rows);
    std::mt19937_64 rng(4);
    std::shuffle(rows.begin(), rows.end(), rng);
    const LayoutSummary b = summarize(rows);
    CHECK(a.success_rate == doctest::Approx(b.success_rate));
    CHECK(a.avg_travel_time == doctest::Approx(b.avg_travel_time));
    CHECK(a.collision_rate == doctest::Approx(b.collision_rate));
    CHECK(a.discomfort_rate == doctest::Approx(b.discomfort_rate));
}
