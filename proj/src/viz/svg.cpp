#include "crowdgame/viz/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crowdgame {

namespace {

const char* kRobotColors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Mapper {
    double scale = 60.0;  // px per meter
    double min_x = 0.0, max_y = 0.0;
    double x(const Vec2& p) const { return (p.x() - min_x) * scale; }
    double y(const Vec2& p) const { return (max_y - p.y()) * scale; }
};

std::string polyline(const Mapper& m, const std::vector<Vec2>& pts, const std::string& color,
                     const std::string& dash) {
    std::ostringstream oss;
    oss << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (!dash.empty()) oss << " stroke-dasharray=\"" << dash << "\"";
    oss << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) oss << ' ';
        oss << num(m.x(pts[i])) << ',' << num(m.y(pts[i]));
    }
    oss << "\"/>\n";
    return oss.str();
}

std::string circle(const Mapper& m, const Vec2& p, double r_px, const std::string& stroke,
                   const std::string& fill) {
    std::ostringstream oss;
    oss << "  <circle cx=\"" << num(m.x(p)) << "\" cy=\"" << num(m.y(p)) << "\" r=\""
        << num(r_px) << "\" stroke=\"" << stroke << "\" stroke-width=\"1.2\" fill=\"" << fill
        << "\"/>\n";
    return oss.str();
}

std::string star(const Mapper& m, const Vec2& p, double r_px, const std::string& color) {
    std::ostringstream oss;
    oss << "  <polygon fill=\"" << color << "\" points=\"";
    for (int k = 0; k < 10; ++k) {
        const double angle = -M_PI / 2.0 + k * M_PI / 5.0;
        const double radius = (k % 2 == 0) ? r_px : 0.4 * r_px;
        if (k > 0) oss << ' ';
        oss << num(m.x(p) + radius * std::cos(angle)) << ','
            << num(m.y(p) + radius * std::sin(angle));
    }
    oss << "\"/>\n";
    return oss.str();
}

}  // namespace

std::string render_svg(const SimRecord& record) {
    if (record.steps.empty()) throw std::runtime_error("render_svg: record has no steps");

    double min_x = 1e30, min_y = 1e30, max_x = -1e30, max_y = -1e30;
    auto grow = [&](const Vec2& p) {
        min_x = std::min(min_x, p.x());
        min_y = std::min(min_y, p.y());
        max_x = std::max(max_x, p.x());
        max_y = std::max(max_y, p.y());
    };
    for (const auto& step : record.steps) {
        for (const auto& p : step.robot_pos) grow(p);
        for (const auto& p : step.human_pos) grow(p);
    }
    for (const auto& g : record.robot_goals) grow(g);
    for (const auto& g : record.human_goals) grow(g);
    const double margin = 1.0;
    min_x -= margin;
    min_y -= margin;
    max_x += margin;
    max_y += margin;

    Mapper m;
    m.min_x = min_x;
    m.max_y = max_y;
    const double width = (max_x - min_x) * m.scale;
    const double height = (max_y - min_y) * m.scale;

    const int num_robots = record.num_robots;
    const int num_humans = static_cast<int>(record.steps.front().human_pos.size());
    const int marker_stride =
        std::max<int>(1, static_cast<int>(record.steps.size()) / 8);

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int h = 0; h < num_humans; ++h) {
        std::vector<Vec2> track;
        for (const auto& step : record.steps) track.push_back(step.human_pos[static_cast<std::size_t>(h)]);
        svg << polyline(m, track, "#888888", "3,3");
        for (std::size_t k = 0; k < track.size(); k += static_cast<std::size_t>(marker_stride)) {
            svg << circle(m, track[k], 5.0, "#555555", "none");
        }
        svg << circle(m, track.back(), 5.0, "#555555", "none");
    }

    for (int i = 0; i < num_robots; ++i) {
        const std::string color = kRobotColors[i % 6];
        std::vector<Vec2> track;
        for (const auto& step : record.steps) track.push_back(step.robot_pos[static_cast<std::size_t>(i)]);
        svg << polyline(m, track, color, "");
        for (std::size_t k = 0; k < track.size(); k += static_cast<std::size_t>(marker_stride)) {
            svg << circle(m, track[k], 5.0, color, color);
        }
        svg << circle(m, track.back(), 5.0, color, color);
        svg << star(m, record.robot_goals[static_cast<std::size_t>(i)], 9.0, "#e00000");
    }

    svg << "</svg>\n";
    return svg.str();
}

void write_svg(const SimRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write SVG '" + path + "'");
    out << render_svg(record);
}

}  // namespace crowdgame
