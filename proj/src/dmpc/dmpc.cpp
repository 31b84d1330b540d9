#include "crowdgame/dmpc/dmpc.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "crowdgame/dynamics/dynamics.hpp"

namespace crowdgame {

RobotWorkerCore::RobotWorkerCore(int id, LocalContext ctx, Strategy initial_strategy,
                                 CostParams params, SolveOptions solver)
    : id_(id), ctx_(std::move(ctx)), params_(std::move(params)), solver_(solver),
      previous_(initial_strategy), current_(std::move(initial_strategy)) {}

std::vector<Vec2> RobotWorkerCore::own_positions(const Strategy& strat) const {
    return rollout_states(ctx_.state, strat, params_.tau).pos;
}

double RobotWorkerCore::cost_of(const Strategy& strat) const {
    return local_player_cost(id_, strat, ctx_, neighbor_positions_, pred_, params_);
}

std::vector<DmpcMessage> RobotWorkerCore::on_message(const DmpcMessage& msg) {
    std::vector<DmpcMessage> replies;

    if (const auto* update = std::get_if<NeighborUpdate>(&msg)) {
        if (update->robot != id_) throw std::runtime_error("neighbor update for wrong robot");
        int max_id = id_;
        for (const auto& [other, traj] : update->neighbors) max_id = std::max(max_id, other);
        if (static_cast<int>(neighbor_positions_.size()) < max_id + 1) {
            neighbor_positions_.resize(static_cast<std::size_t>(max_id + 1));
        }
        for (const auto& [other, traj] : update->neighbors) {
            neighbor_positions_[static_cast<std::size_t>(other)] = traj;
        }
        if (update->iter == 0) return replies;  // initial trajectory table, no reply

        // epsilon-Nash check against the refreshed neighbor trajectories.
        const double cost_current = cost_of(current_);
        const double cost_previous = cost_of(previous_);
        ConvFlag flag;
        flag.iter = update->iter;
        flag.robot = id_;
        flag.converged = cost_current <= cost_previous + params_.epsilon;
        replies.emplace_back(flag);
        previous_ = current_;
        return replies;
    }

    if (const auto* broadcast = std::get_if<PredictionBroadcast>(&msg)) {
        if (broadcast->iter <= last_iter_) {
            throw std::runtime_error("prediction iteration did not increase");
        }
        last_iter_ = broadcast->iter;
        pred_ = broadcast->pred;

        const double cost_before = cost_of(previous_);
        try {
            const int horizon = previous_.horizon();
            const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2 * horizon, -params_.a_max);
            const Eigen::VectorXd hi = Eigen::VectorXd::Constant(2 * horizon, params_.a_max);
            const BoxObjective objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
                const Strategy strat = strategy_from_vector(u);
                if (grad != nullptr) {
                    *grad = grad_local_player_cost(id_, strat, ctx_, neighbor_positions_, pred_,
                                                   params_, params_.tau);
                }
                return cost_of(strat);
            };
            auto [u_sol, report] = minimize_box(objective, lo, hi, flatten(previous_), solver_);
            (void)report;
            const Strategy candidate = strategy_from_vector(u_sol);
            // Accept only a clear improvement over keeping the previous
            // strategy (neighbors still frozen at their last exchange).
            if (cost_of(candidate) > cost_before - params_.epsilon) {
                current_ = previous_;
            } else {
                current_ = candidate;
            }
        } catch (const SolverError& e) {
            WorkerError err;
            err.iter = broadcast->iter;
            err.robot = id_;
            err.message = e.what();
            replies.emplace_back(std::move(err));
            return replies;
        }

        BestResponse response;
        response.iter = broadcast->iter;
        response.robot = id_;
        response.strategy = current_;
        response.trajectory = own_positions(current_);
        replies.emplace_back(std::move(response));
        return replies;
    }

    if (std::holds_alternative<Terminate>(msg)) {
        terminated_ = true;
        return replies;
    }

    throw std::runtime_error(std::string("worker got unexpected message type: ") +
                             message_type_name(msg));
}

void run_robot_worker(RobotWorkerCore& core, WorkerTransport& transport,
                      std::chrono::milliseconds idle_timeout) {
    while (!core.terminated()) {
        const DmpcMessage msg = transport.recv(idle_timeout);
        for (const auto& reply : core.on_message(msg)) transport.send(reply);
    }
}

DmpcResult run_coordinator(const std::vector<LocalContext>& robots,
                           const PositionHistory& history, const Predictor& predictor,
                           const CostParams& params, const JointStrategy& u_init,
                           CoordinatorTransport& transport, const DmpcOptions& options) {
    const int num_robots = static_cast<int>(robots.size());
    const int horizon = params.H;
    if (transport.num_robots() != num_robots) {
        throw std::invalid_argument("run_coordinator: transport robot count mismatch");
    }
    if (!history.warm()) throw std::invalid_argument("run_coordinator: history is not warm");

    GameContext ctx;
    ctx.robots = robots;

    JointStrategy joint = u_init;
    std::vector<std::vector<Vec2>> plans = joint_positions(joint, ctx, params.tau);

    auto neighbor_update_for = [&](int robot, int iter) {
        NeighborUpdate update;
        update.iter = iter;
        update.robot = robot;
        for (int other = 0; other < num_robots; ++other) {
            if (other == robot) continue;
            update.neighbors.emplace_back(other, plans[static_cast<std::size_t>(other)]);
        }
        return update;
    };

    // Initial trajectory table so each worker can evaluate its cost at j=1.
    for (int i = 0; i < num_robots; ++i) transport.send(i, neighbor_update_for(i, 0));

    DmpcResult result;
    auto expect = [&]<typename T>(int robot, std::type_identity<T>) -> T {
        DmpcMessage msg = transport.recv(robot, options.worker_timeout);
        if (const auto* err = std::get_if<WorkerError>(&msg)) {
            throw std::runtime_error("dmpc worker " + std::to_string(err->robot) +
                                     " failed: " + err->message);
        }
        if (!std::holds_alternative<T>(msg)) {
            throw std::runtime_error(std::string("dmpc protocol violation: unexpected ") +
                                     message_type_name(msg));
        }
        return std::get<T>(std::move(msg));
    };

    for (int j = 1; j <= params.j_max; ++j) {
        const PredictedCrowd pred = rollout_prediction(predictor, history, plans, horizon);
        ctx.pred = pred;

        PredictionBroadcast broadcast;
        broadcast.iter = j;
        broadcast.pred = pred;
        for (int i = 0; i < num_robots; ++i) transport.send(i, broadcast);

        for (int i = 0; i < num_robots; ++i) {
            BestResponse response = expect(i, std::type_identity<BestResponse>{});
            if (response.iter != j || response.robot != i) {
                throw std::runtime_error("dmpc protocol violation: stale best response");
            }
            joint.per_robot[static_cast<std::size_t>(i)] = response.strategy;
            plans[static_cast<std::size_t>(i)] = response.trajectory;
        }

        for (int i = 0; i < num_robots; ++i) transport.send(i, neighbor_update_for(i, j));

        DmpcIterationTrace iter_trace;
        iter_trace.iteration = j;
        bool all_converged = true;
        for (int i = 0; i < num_robots; ++i) {
            ConvFlag flag = expect(i, std::type_identity<ConvFlag>{});
            if (flag.iter != j || flag.robot != i) {
                throw std::runtime_error("dmpc protocol violation: stale conv flag");
            }
            iter_trace.conv_flags.push_back(flag.converged);
            all_converged = all_converged && flag.converged;
        }
        for (int i = 0; i < num_robots; ++i) {
            iter_trace.player_costs.push_back(player_cost(i, joint, ctx, params));
        }
        iter_trace.potential_value = potential(joint, ctx, params);
        result.trace.push_back(std::move(iter_trace));

        if (all_converged || j == params.j_max) {
            Terminate terminate;
            terminate.iter = j;
            terminate.strategy = joint;
            for (int i = 0; i < num_robots; ++i) transport.send(i, terminate);
            result.converged = all_converged;
            result.strategy = joint;
            result.final_prediction = pred;
            return result;
        }
    }

    throw std::logic_error("run_coordinator: unreachable");
}

DmpcResult solve_dmpc(const std::vector<LocalContext>& robots, const PositionHistory& history,
                      const Predictor& predictor, const CostParams& params,
                      const JointStrategy& u_init, const DmpcOptions& options) {
    std::vector<std::unique_ptr<RobotWorkerCore>> cores;
    std::vector<WorkerHandler> handlers;
    for (std::size_t i = 0; i < robots.size(); ++i) {
        cores.push_back(std::make_unique<RobotWorkerCore>(
            static_cast<int>(i), robots[i], u_init.per_robot.at(i), params, options.solver));
        RobotWorkerCore* core = cores.back().get();
        handlers.emplace_back([core](const DmpcMessage& msg) { return core->on_message(msg); });
    }
    LocalTransport transport(std::move(handlers));
    DmpcResult result = run_coordinator(robots, history, predictor, params, u_init, transport, options);
    transport.flush();  // deliver the final Terminate to the cores
    return result;
}

DmpcResult solve_dmpc_tcp(const std::vector<LocalContext>& robots,
                          const PositionHistory& history, const Predictor& predictor,
                          const CostParams& params, const JointStrategy& u_init, int port,
                          const DmpcOptions& options) {
    const int num_robots = static_cast<int>(robots.size());
    TcpCoordinatorTransport transport(num_robots, port);
    const int actual_port = transport.port();

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(num_robots));
    std::vector<std::exception_ptr> worker_errors(static_cast<std::size_t>(num_robots));
    for (int i = 0; i < num_robots; ++i) {
        threads.emplace_back([&, i]() {
            try {
                TcpWorkerTransport link("127.0.0.1", actual_port, i);
                RobotWorkerCore core(i, robots[static_cast<std::size_t>(i)],
                                     u_init.per_robot.at(static_cast<std::size_t>(i)), params,
                                     options.solver);
                run_robot_worker(core, link);
            } catch (...) {
                worker_errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        });
    }

    DmpcResult result;
    std::exception_ptr coordinator_error;
    try {
        transport.accept_workers(options.worker_timeout);
        result = run_coordinator(robots, history, predictor, params, u_init, transport, options);
    } catch (...) {
        coordinator_error = std::current_exception();
    }
    for (auto& t : threads) t.join();
    if (coordinator_error) std::rethrow_exception(coordinator_error);
    for (const auto& err : worker_errors) {
        if (err) std::rethrow_exception(err);
    }
    return result;
}

}  // namespace crowdgame
