#ifndef CROWDGAME_CORE_CONFIG_HPP
#define CROWDGAME_CORE_CONFIG_HPP

#include <stdexcept>
#include <string>

#include "crowdgame/core/types.hpp"

namespace crowdgame {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameters plus scenario, as stored in a UTF-8 JSON config file.
///
/// Top-level keys: "params", "robots", "humans", "layout", "seed".
/// All 2-vectors are [x, y] arrays in meters. Pairwise parameters
/// (omega_coll_robot, omega_floc, d_flock) accept either a scalar
/// (uniform over robot pairs) or a full MxM array.
///
/// For generated layouts the agent lists may be omitted in favor of
/// "num_robots"/"num_humans"; the scenario is then produced from "seed".
struct Config {
    CostParams params;
    Scenario scenario;
    // Requested team/crowd sizes when the agent lists are omitted for a
    // generated layout.
    int num_robots = 0;
    int num_humans = 0;

    bool needs_generation() const {
        return scenario.layout != Layout::Custom && scenario.robots.empty() &&
               scenario.humans.empty();
    }
};

Config load_config(const std::string& path);
Config parse_config(const std::string& json_text);

std::string config_to_json(const Config& config);
void save_config(const Config& config, const std::string& path);

}  // namespace crowdgame

#endif  // CROWDGAME_CORE_CONFIG_HPP
