#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdgame/core/config.hpp"
#include "crowdgame/harness/harness.hpp"
#include "crowdgame/predictor/external_predictor.hpp"
#include "crowdgame/sim/episode.hpp"
#include "crowdgame/viz/svg.hpp"

#include <json.hpp>

namespace {

using namespace crowdgame;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int thread_cap() {
    if (const char* env = std::getenv("CROWDGAME_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) return cap;
    }
    return 0;  // harness default: hardware concurrency
}

std::unique_ptr<Predictor> make_predictor(const std::string& kind, const std::string& endpoint,
                                          const CostParams& params) {
    if (kind == "cv") return std::make_unique<ConstantVelocityPredictor>();
    if (kind == "social") {
        return std::make_unique<SocialPredictor>(0.3, 2.0, params.tau, params.v_max);
    }
    if (kind == "external") {
        if (endpoint.empty()) {
            throw ConfigError("--predictor external requires --endpoint tcp:host:port or cmd:...");
        }
        return ExternalPredictor::open(endpoint);
    }
    throw ConfigError("unknown predictor '" + kind + "' (expected cv, social or external)");
}

Scenario resolve_scenario(const Config& config, bool seed_given, std::uint64_t seed) {
    if (config.needs_generation()) {
        return gen_layout(config.scenario.layout, seed_given ? seed : config.scenario.seed,
                          config.num_robots, config.num_humans, config.params.d_min);
    }
    if (seed_given && config.scenario.layout != Layout::Custom) {
        return gen_layout(config.scenario.layout, seed, config.scenario.num_robots(),
                          config.scenario.num_humans(), config.params.d_min);
    }
    return config.scenario;
}

struct RunArgs {
    std::string config_path;
    std::string method = "cmpc";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string log_path;
    std::string predictor = "cv";
    std::string endpoint;
    std::string transport = "local";
    int port = 0;
    bool strict_alg1 = false;
};

int cmd_run(const RunArgs& args) {
    Config config = load_config(args.config_path);
    const Scenario scenario = resolve_scenario(config, args.seed_given, args.seed);

    const auto violations = validate_scenario(scenario, config.params);
    if (!violations.empty()) {
        std::cerr << "invalid scenario:\n";
        for (const auto& v : violations) std::cerr << "  - " << v << "\n";
        return kExitUsage;
    }

    const auto predictor = make_predictor(args.predictor, args.endpoint, config.params);

    EpisodeOptions options;
    options.method = method_from_name(args.method);
    options.cmpc.strict_last_iterate = args.strict_alg1;
    if (options.method == Method::Dmpc && args.transport == "tcp") {
        const int port = args.port;
        options.dmpc_solver = [port](const std::vector<LocalContext>& robots,
                                     const PositionHistory& history, const Predictor& pred,
                                     const CostParams& params, const JointStrategy& warm) {
            return solve_dmpc_tcp(robots, history, pred, params, warm, port);
        };
    } else if (args.transport != "local" && args.transport != "tcp") {
        throw ConfigError("unknown transport '" + args.transport + "' (expected local or tcp)");
    }

    const SimRecord record = run_episode(scenario, config.params, *predictor, options);
    if (!args.log_path.empty()) write_trajectory_log(record, args.log_path);

    const EpisodeResult result = evaluate_episode(record, config.params);
    std::cout << "method:        " << args.method << "\n"
              << "layout:        " << layout_name(scenario.layout) << "\n"
              << "seed:          " << scenario.seed << "\n"
              << "steps:         " << record.steps.size() - 1 << "\n"
              << "success:       " << (result.success ? "yes" : "no") << "\n";
    if (result.success) std::cout << "travel_time:   " << result.travel_time << " s\n";
    std::cout << "collision:     " << (result.collision ? "yes" : "no") << "\n"
              << "discomfort:    " << (result.discomfort ? "yes" : "no") << "\n"
              << "min_distance:  " << result.min_robot_human_distance << " m\n"
              << "mean_ibr:      " << result.mean_ibr_iterations << "\n";
    return kExitOk;
}

std::vector<int> parse_humans_spec(const std::string& spec) {
    std::vector<int> out;
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(spec.substr(0, dots));
        const int hi = std::stoi(spec.substr(dots + 2));
        if (hi < lo) throw ConfigError("bad --humans range '" + spec + "'");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const std::string tok = spec.substr(start, comma == std::string::npos ? spec.size() - start
                                                                              : comma - start);
        if (!tok.empty()) out.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty --humans spec");
    return out;
}

std::vector<std::string> split_list(const std::string& spec) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const std::string tok = spec.substr(start, comma == std::string::npos ? spec.size() - start
                                                                              : comma - start);
        if (!tok.empty()) out.push_back(tok);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct BatchArgs {
    std::string config_path;
    int episodes = 100;
    std::string humans = "5";
    std::string methods = "cmpc";
    std::string flocking = "on";
    std::string out_dir = "results";
    int robots = 3;
    std::uint64_t seed_base = 1;
    int threads = 0;
    std::string predictor = "cv";
};

int cmd_batch(const BatchArgs& args) {
    CostParams params = CostParams::defaults(args.robots);
    int num_robots = args.robots;
    if (!args.config_path.empty()) {
        Config config = load_config(args.config_path);
        params = config.params;
        if (config.num_robots > 0) num_robots = config.num_robots;
    }

    const auto humans_list = parse_humans_spec(args.humans);
    const auto methods = split_list(args.methods);
    const auto flocking_modes = split_list(args.flocking);
    if (methods.empty() || flocking_modes.empty()) throw ConfigError("empty --methods/--flocking");

    int cap = thread_cap();
    int threads = args.threads > 0 ? args.threads : (cap > 0 ? cap : 0);
    if (cap > 0 && threads > cap) threads = cap;

    nlohmann::json grid = nlohmann::json::array();
    for (const auto& method : methods) {
        for (const auto& flocking : flocking_modes) {
            if (flocking != "on" && flocking != "off") {
                throw ConfigError("--flocking entries must be on or off");
            }
            for (const int humans : humans_list) {
                BatchConfig config;
                config.params = params;
                config.num_robots = num_robots;
                config.num_humans = humans;
                config.episodes = args.episodes;
                config.method = method_from_name(method);
                config.flocking = flocking == "on";
                config.predictor = args.predictor == "social" ? PredictorKind::Social
                                                              : PredictorKind::ConstantVelocity;
                config.seed_base = args.seed_base;
                config.parallelism = threads;

                const BatchSummary summary = run_batch(config);
                const std::string tag =
                    method + "_" + (config.flocking ? "f" : "nf") + "_h" + std::to_string(humans);
                write_batch_outputs(summary, args.out_dir, tag);

                nlohmann::json cell;
                cell["method"] = method;
                cell["flocking"] = config.flocking;
                cell["humans"] = humans;
                cell["success_rate"] = summary.overall.success_rate;
                cell["avg_travel_time"] = summary.overall.avg_travel_time;
                cell["collision_rate"] = summary.overall.collision_rate;
                cell["discomfort_rate"] = summary.overall.discomfort_rate;
                grid.push_back(cell);
                std::cout << tag << ": success " << summary.overall.success_rate
                          << "%, travel " << summary.overall.avg_travel_time << " s, collision "
                          << summary.overall.collision_rate << "%, discomfort "
                          << summary.overall.discomfort_rate << "%\n";
            }
        }
    }
    std::ofstream grid_out(args.out_dir + "/grid.json");
    if (!grid_out) throw std::runtime_error("cannot write grid summary");
    grid_out << grid.dump(2) << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& log_path, const std::string& out_path) {
    const SimRecord record = read_trajectory_log(log_path);
    if (record.steps.empty()) throw ConfigError("trajectory log has no steps");
    write_svg(record, out_path);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Game-theoretic multi-robot crowd navigation"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run one episode");
    run->add_option("--config", run_args.config_path, "Scenario config JSON")->required();
    run->add_option("--method", run_args.method, "cmpc or dmpc");
    auto* seed_opt = run->add_option("--seed", run_args.seed, "Regenerate the layout with this seed");
    run->add_option("--log", run_args.log_path, "Write trajectory log (JSONL)");
    run->add_option("--predictor", run_args.predictor, "cv, social or external");
    run->add_option("--endpoint", run_args.endpoint, "External predictor endpoint");
    run->add_option("--transport", run_args.transport, "DMPC transport: local or tcp");
    run->add_option("--port", run_args.port, "Coordinator TCP port (0 = ephemeral)");
    run->add_flag("--strict-alg1", run_args.strict_alg1,
                  "Return the literal last iterate when the outer loop cycles");

    BatchArgs batch_args;
    auto* batch = app.add_subcommand("batch", "Run a Monte-Carlo experiment grid");
    batch->add_option("--config", batch_args.config_path, "Parameter config JSON");
    batch->add_option("--episodes", batch_args.episodes, "Episodes per grid cell");
    batch->add_option("--humans", batch_args.humans, "Crowd sizes, e.g. 5..9 or 5,7");
    batch->add_option("--methods", batch_args.methods, "Comma list of cmpc,dmpc");
    batch->add_option("--flocking", batch_args.flocking, "Comma list of on,off");
    batch->add_option("--out", batch_args.out_dir, "Output directory");
    batch->add_option("--robots", batch_args.robots, "Team size");
    batch->add_option("--seed-base", batch_args.seed_base, "First episode seed");
    batch->add_option("--threads", batch_args.threads, "Episode parallelism");
    batch->add_option("--predictor", batch_args.predictor, "cv or social");

    std::string plot_log;
    std::string plot_out = "trajectory.svg";
    auto* plot = app.add_subcommand("plot", "Render a trajectory log as SVG");
    plot->add_option("--log", plot_log, "Trajectory log (JSONL)")->required();
    plot->add_option("--out", plot_out, "Output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            run_args.seed_given = seed_opt->count() > 0;
            return cmd_run(run_args);
        }
        if (batch->parsed()) return cmd_batch(batch_args);
        if (plot->parsed()) return cmd_plot(plot_log, plot_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
