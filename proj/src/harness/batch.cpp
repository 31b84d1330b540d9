#include "crowdgame/harness/harness.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace crowdgame {

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string fingerprint(const BatchConfig& config) {
    std::ostringstream oss;
    oss << method_name(config.method) << '|' << config.num_robots << '|' << config.num_humans
        << '|' << config.episodes << '|' << (config.flocking ? "f" : "nf") << '|'
        << (config.predictor == PredictorKind::ConstantVelocity ? "cv" : "social") << '|'
        << config.seed_base << '|' << config.params.H << '|' << config.params.tau << '|'
        << config.params.omega_goal << '|' << config.params.omega_coll_human;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(oss.str())));
    return buf;
}

std::unique_ptr<Predictor> make_predictor(const BatchConfig& config) {
    if (config.predictor == PredictorKind::Social) {
        return std::make_unique<SocialPredictor>(0.3, 2.0, config.params.tau,
                                                 config.params.v_max);
    }
    return std::make_unique<ConstantVelocityPredictor>();
}

}  // namespace

LayoutSummary summarize(const std::vector<EpisodeRow>& rows) {
    LayoutSummary s;
    s.episodes = static_cast<int>(rows.size());
    if (rows.empty()) return s;
    double travel_sum = 0.0;
    double ibr_sum = 0.0;
    int collisions = 0;
    int discomforts = 0;
    for (const auto& row : rows) {
        if (row.result.success) {
            ++s.successes;
            travel_sum += row.result.travel_time;
        }
        collisions += row.result.collision ? 1 : 0;
        discomforts += row.result.discomfort ? 1 : 0;
        ibr_sum += row.result.mean_ibr_iterations;
    }
    const double n = static_cast<double>(s.episodes);
    s.success_rate = 100.0 * static_cast<double>(s.successes) / n;
    s.avg_travel_time = s.successes > 0 ? travel_sum / static_cast<double>(s.successes) : 0.0;
    s.collision_rate = 100.0 * static_cast<double>(collisions) / n;
    s.discomfort_rate = 100.0 * static_cast<double>(discomforts) / n;
    s.mean_ibr_iterations = ibr_sum / n;
    return s;
}

BatchSummary run_batch(const BatchConfig& config) {
    CostParams params = config.params;
    if (!config.flocking) params.omega_floc.setZero();

    const int episodes = config.episodes;
    const int num_circular = (episodes + 1) / 2;

    struct Job {
        Layout layout;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
        jobs.push_back(Job{e < num_circular ? Layout::CircularCrossing
                                            : Layout::PerpendicularCrossing,
                           config.seed_base + static_cast<std::uint64_t>(e)});
    }

    std::vector<EpisodeRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        const auto predictor = make_predictor(config);
        EpisodeOptions options;
        options.method = config.method;
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) break;
            const Scenario scenario =
                gen_layout(jobs[idx].layout, jobs[idx].seed, config.num_robots,
                           config.num_humans, params.d_min);
            const SimRecord record = run_episode(scenario, params, *predictor, options);
            rows[idx] = EpisodeRow{config.method, jobs[idx].layout, jobs[idx].seed,
                                   evaluate_episode(record, params)};
        }
    };

    int threads = config.parallelism > 0
                      ? config.parallelism
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, episodes == 0 ? 1 : episodes));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    BatchSummary summary;
    summary.episodes = episodes;
    summary.config_fingerprint = fingerprint(config);
    std::vector<EpisodeRow> circular_rows;
    std::vector<EpisodeRow> perpendicular_rows;
    for (const auto& row : rows) {
        if (row.layout == Layout::CircularCrossing) {
            circular_rows.push_back(row);
        } else {
            perpendicular_rows.push_back(row);
        }
    }
    summary.circular = summarize(circular_rows);
    summary.perpendicular = summarize(perpendicular_rows);
    summary.overall = summarize(rows);
    summary.rows = std::move(rows);
    return summary;
}

std::string batch_csv(const BatchSummary& summary) {
    std::ostringstream oss;
    oss << "method,layout,seed,success,travel_time,collision,discomfort,mean_ibr_iters\n";
    char buf[64];
    for (const auto& row : summary.rows) {
        oss << method_name(row.method) << ',' << layout_name(row.layout) << ',' << row.seed
            << ',' << (row.result.success ? 1 : 0) << ',';
        if (row.result.success) {
            std::snprintf(buf, sizeof(buf), "%.4f", row.result.travel_time);
            oss << buf;
        }
        oss << ',' << (row.result.collision ? 1 : 0) << ',' << (row.result.discomfort ? 1 : 0)
            << ',';
        std::snprintf(buf, sizeof(buf), "%.4f", row.result.mean_ibr_iterations);
        oss << buf << '\n';
    }
    return oss.str();
}

namespace {

nlohmann::json layout_summary_json(const LayoutSummary& s) {
    return {{"episodes", s.episodes},
            {"successes", s.successes},
            {"success_rate", s.success_rate},
            {"avg_travel_time", s.avg_travel_time},
            {"collision_rate", s.collision_rate},
            {"discomfort_rate", s.discomfort_rate},
            {"mean_ibr_iterations", s.mean_ibr_iterations}};
}

}  // namespace

std::string batch_summary_json(const BatchSummary& summary) {
    nlohmann::json j;
    j["episodes"] = summary.episodes;
    j["config_fingerprint"] = summary.config_fingerprint;
    j["circular"] = layout_summary_json(summary.circular);
    j["perpendicular"] = layout_summary_json(summary.perpendicular);
    j["overall"] = layout_summary_json(summary.overall);
    return j.dump(2) + "\n";
}

void write_batch_outputs(const BatchSummary& summary, const std::string& out_dir,
                         const std::string& tag) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir + "/" + tag + ".csv");
        if (!csv) throw std::runtime_error("cannot write batch CSV in '" + out_dir + "'");
        csv << batch_csv(summary);
    }
    {
        std::ofstream js(out_dir + "/" + tag + "_summary.json");
        if (!js) throw std::runtime_error("cannot write batch summary in '" + out_dir + "'");
        js << batch_summary_json(summary);
    }
}

}  // namespace crowdgame
