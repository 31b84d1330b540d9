#ifndef CROWDGAME_VIZ_SVG_HPP
#define CROWDGAME_VIZ_SVG_HPP

#include <string>

#include "crowdgame/sim/episode.hpp"

namespace crowdgame {

/// Renders an episode as a standalone SVG: robot tracks as solid circles,
/// human tracks as unfilled circles, robot goals as stars. Byte-for-byte
/// deterministic for a given record.
std::string render_svg(const SimRecord& record);

void write_svg(const SimRecord& record, const std::string& path);

}  // namespace crowdgame

#endif  // CROWDGAME_VIZ_SVG_HPP
