#include "crowdgame/dmpc/messages.hpp"

#include <stdexcept>

#include <json.hpp>

namespace crowdgame {

using nlohmann::json;

namespace {

json positions_to(const std::vector<Vec2>& positions) {
    json out = json::array();
    for (const auto& p : positions) out.push_back(json::array({p.x(), p.y()}));
    return out;
}

std::vector<Vec2> positions_from(const json& j) {
    std::vector<Vec2> out;
    out.reserve(j.size());
    for (const auto& p : j) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return out;
}

json strategy_to(const Strategy& s) { return positions_to(s.controls); }

Strategy strategy_from(const json& j) {
    Strategy s;
    s.controls = positions_from(j);
    return s;
}

}  // namespace

const char* message_type_name(const DmpcMessage& msg) {
    static constexpr const char* names[] = {"prediction", "best_response", "neighbor_update",
                                            "conv_flag", "terminate", "error"};
    return names[msg.index()];
}

std::string message_to_json(const DmpcMessage& msg) {
    json j;
    j["type"] = message_type_name(msg);
    json payload = json::object();
    int iter = 0;
    int robot = -1;

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            iter = m.iter;
            if constexpr (std::is_same_v<T, PredictionBroadcast>) {
                json slices = json::array();
                for (const auto& slice : m.pred.slices) slices.push_back(positions_to(slice));
                payload["slices"] = std::move(slices);
            } else if constexpr (std::is_same_v<T, BestResponse>) {
                robot = m.robot;
                payload["trajectory"] = positions_to(m.trajectory);
                payload["strategy"] = strategy_to(m.strategy);
            } else if constexpr (std::is_same_v<T, NeighborUpdate>) {
                robot = m.robot;
                json neighbors = json::array();
                for (const auto& [id, traj] : m.neighbors) {
                    neighbors.push_back({{"robot", id}, {"trajectory", positions_to(traj)}});
                }
                payload["neighbors"] = std::move(neighbors);
            } else if constexpr (std::is_same_v<T, ConvFlag>) {
                robot = m.robot;
                payload["converged"] = m.converged;
            } else if constexpr (std::is_same_v<T, Terminate>) {
                json strategies = json::array();
                for (const auto& s : m.strategy.per_robot) strategies.push_back(strategy_to(s));
                payload["strategies"] = std::move(strategies);
            } else if constexpr (std::is_same_v<T, WorkerError>) {
                robot = m.robot;
                payload["message"] = m.message;
            }
        },
        msg);

    j["iter"] = iter;
    j["robot"] = robot;
    j["payload"] = std::move(payload);
    return j.dump();
}

DmpcMessage message_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("bad dmpc message: ") + e.what());
    }
    const std::string type = j.at("type").get<std::string>();
    const int iter = j.at("iter").get<int>();
    const int robot = j.at("robot").get<int>();
    const json& payload = j.at("payload");

    if (type == "prediction") {
        PredictionBroadcast m;
        m.iter = iter;
        for (const auto& slice : payload.at("slices")) m.pred.slices.push_back(positions_from(slice));
        return m;
    }
    if (type == "best_response") {
        BestResponse m;
        m.iter = iter;
        m.robot = robot;
        m.trajectory = positions_from(payload.at("trajectory"));
        m.strategy = strategy_from(payload.at("strategy"));
        return m;
    }
    if (type == "neighbor_update") {
        NeighborUpdate m;
        m.iter = iter;
        m.robot = robot;
        for (const auto& n : payload.at("neighbors")) {
            m.neighbors.emplace_back(n.at("robot").get<int>(),
                                     positions_from(n.at("trajectory")));
        }
        return m;
    }
    if (type == "conv_flag") {
        ConvFlag m;
        m.iter = iter;
        m.robot = robot;
        m.converged = payload.at("converged").get<bool>();
        return m;
    }
    if (type == "terminate") {
        Terminate m;
        m.iter = iter;
        for (const auto& s : payload.at("strategies")) m.strategy.per_robot.push_back(strategy_from(s));
        return m;
    }
    if (type == "error") {
        WorkerError m;
        m.iter = iter;
        m.robot = robot;
        m.message = payload.at("message").get<std::string>();
        return m;
    }
    throw std::runtime_error("bad dmpc message: unknown type '" + type + "'");
}

}  // namespace crowdgame
