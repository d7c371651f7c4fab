#include "strbill/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace strbill {

std::string svg_number(double x) {
    if (x == 0.0 || !std::isfinite(x)) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    std::string s = buf;
    return s == "-0" ? "0" : s;
}

std::vector<Vec2> trajectory_polyline(const Trajectory& t) {
    std::vector<Vec2> out{t.start.q};
    for (const auto& e : t.events) out.push_back(e.hit.point);
    if (!(out.back() == t.exit.q)) out.push_back(t.exit.q);
    return out;
}

namespace {

struct Frame {
    Box world;
    double s{1.0};
    double ox{0.0}, oy{0.0}, height{0.0};

    double X(double x) const { return ox + (x - world.lo.x) * s; }
    double Y(double y) const { return height - oy - (y - world.lo.y) * s; }
};

Frame make_frame(const Box& world, const RenderSpec& spec) {
    Frame f;
    f.world = world;
    f.height = spec.height;
    const double w = std::max(world.hi.x - world.lo.x, 1e-12), h = std::max(world.hi.y - world.lo.y, 1e-12);
    const double aw = spec.width - 2.0 * spec.margin, ah = spec.height - 2.0 * spec.margin;
    f.s = std::min(aw / w, ah / h);
    f.ox = spec.margin + 0.5 * (aw - w * f.s);
    f.oy = spec.margin + 0.5 * (ah - h * f.s);
    return f;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return 0;
}

// Linear blend of two #rrggbb or #rgb colors; other colors pick an endpoint.
std::string blend(const std::string& lo, const std::string& hi, double t) {
    const auto rgb = [](const std::string& c, int out[3]) {
        if (c.size() == 7 && c[0] == '#') {
            for (int k = 0; k < 3; ++k) out[k] = 16 * hex_digit(c[1 + 2 * k]) + hex_digit(c[2 + 2 * k]);
            return true;
        }
        if (c.size() == 4 && c[0] == '#') {
            for (int k = 0; k < 3; ++k) out[k] = 17 * hex_digit(c[1 + k]);
            return true;
        }
        return false;
    };
    int a[3], b[3];
    if (!rgb(lo, a) || !rgb(hi, b)) return t < 0.5 ? lo : hi;
    char buf[8];
    int c[3];
    for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(a[k] + (b[k] - a[k]) * t));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

void point(std::ostringstream& os, const Frame& f, const Vec2& p) { os << svg_number(f.X(p.x)) << ' ' << svg_number(f.Y(p.y)); }

// A commands for the arc in traversal direction, split into pieces of at
// most half a turn so the large-arc flag is always 0.
void arc_commands(std::ostringstream& os, const Frame& f, const EllipticArc& arc, bool reversed) {
    const double span = arc.span();
    const int pieces = std::max(1, static_cast<int>(std::ceil(span / pi - 1e-9)));
    const Vec2 u = arc.axis();
    // An ellipse is symmetric under a half turn; keep the rotation in (-90, 90].
    double rot = -std::atan2(u.y, u.x) * 180.0 / pi;
    while (rot > 90.0) rot -= 180.0;
    while (rot <= -90.0) rot += 180.0;
    const double rx = arc.semi_major() * f.s, ry = arc.semi_minor() * f.s;
    // The y flip turns anticlockwise into the negative-angle SVG sweep.
    const int sweep = reversed ? 1 : 0;
    for (int k = 1; k <= pieces; ++k) {
        const double frac = static_cast<double>(k) / pieces;
        const double s = reversed ? arc.s1 - span * frac : arc.s0 + span * frac;
        const Vec2 p = k == pieces ? (reversed ? arc.start() : arc.end()) : arc.point(s);
        os << " A " << svg_number(rx) << ' ' << svg_number(ry) << ' ' << svg_number(rot) << " 0 " << sweep << ' ';
        point(os, f, p);
    }
}

std::string chain_path(const Frame& f, const BoundaryChain& ch) {
    std::ostringstream os;
    os << 'M';
    os << ' ';
    point(os, f, ch.elements.front().start());
    for (const auto& ce : ch.elements) {
        if (const auto* seg = std::get_if<LineSegment>(&ce.geom)) {
            os << " L ";
            point(os, f, ce.reversed ? seg->a : seg->b);
        } else {
            arc_commands(os, f, std::get<EllipticArc>(ce.geom), ce.reversed);
        }
    }
    if (dist(ch.elements.back().end(), ch.elements.front().start()) <= 1e-9 * (1.0 + norm(f.world.extent())))
        os << " Z";
    return os.str();
}

void rect(std::ostringstream& os, const Frame& f, const GridSpec& g, std::size_t k, const std::string& fill) {
    const std::size_t i = k % g.nx, j = k / g.nx;
    const double x0 = g.origin.x + static_cast<double>(i) * g.cell.x, y1 = g.origin.y + static_cast<double>(j + 1) * g.cell.y;
    os << "<rect x=\"" << svg_number(f.X(x0)) << "\" y=\"" << svg_number(f.Y(y1)) << "\" width=\""
       << svg_number(g.cell.x * f.s) << "\" height=\"" << svg_number(g.cell.y * f.s) << "\" fill=\"" << fill
       << "\"/>\n";
}

void add_grid(Box& box, const GridSpec& g) {
    box.add(g.origin);
    box.add(Vec2{g.origin.x + g.cell.x * static_cast<double>(g.nx), g.origin.y + g.cell.y * static_cast<double>(g.ny)});
}

}  // namespace

std::string render_svg(const Scene& scene, const Overlays& ov, const RenderSpec& spec) {
    Box world;
    for (const auto& ch : scene.chains)
        for (const auto& ce : ch.elements) world.add(element_bounds(ce.geom));
    for (const auto& b : scene.bodies) world.add(b.bounds());
    if (spec.show_trajectories)
        for (const auto& t : ov.trajectories)
            for (const auto& p : t) world.add(p);
    if (spec.show_heatmap || spec.show_dark) {
        if (ov.illumination) add_grid(world, ov.illumination->grid);
        if (ov.scan) add_grid(world, ov.scan->grid);
    }
    if (world.empty()) world.add(Vec2{0.0, 0.0});
    const Frame f = make_frame(world, spec);

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << svg_number(spec.width)
       << "\" height=\"" << svg_number(spec.height) << "\" viewBox=\"0 0 " << svg_number(spec.width) << ' '
       << svg_number(spec.height) << "\">\n";

    if (spec.show_heatmap && (ov.illumination || ov.scan)) {
        os << "<g id=\"heatmap\" stroke=\"none\">\n";
        if (const IlluminationMap* m = ov.illumination) {
            std::uint32_t peak = 0;
            for (auto c : m->counts) peak = std::max(peak, c);
            for (std::size_t k = 0; k < m->counts.size(); ++k) {
                if (m->counts[k] == 0) continue;
                const double t = peak > 1 ? std::log1p(static_cast<double>(m->counts[k])) / std::log1p(static_cast<double>(peak)) : 1.0;
                rect(os, f, m->grid, k, blend(spec.heat_low, spec.heat_high, t));
            }
        }
        if (const RegionScan* s = ov.scan) {
            for (std::size_t k = 0; k < s->cells.size(); ++k) {
                if (!s->cells[k]) continue;
                const PointLabel l = s->cells[k]->label;
                rect(os, f, s->grid, k,
                     l == PointLabel::free ? spec.free_color : l == PointLabel::mixed ? spec.mixed_color : spec.hidden_color);
            }
        }
        os << "</g>\n";
    }

    if (spec.show_bodies && !scene.bodies.empty()) {
        os << "<g id=\"bodies\" fill=\"" << spec.body_color << "\" stroke=\"" << spec.body_color << "\">\n";
        for (const auto& b : scene.bodies) {
            if (b.kind == BodyKind::point) {
                os << "<circle cx=\"" << svg_number(f.X(b.vertices[0].x)) << "\" cy=\"" << svg_number(f.Y(b.vertices[0].y))
                   << "\" r=\"" << svg_number(2.0 * spec.wall_width) << "\"/>\n";
            } else if (b.kind == BodyKind::segment) {
                os << "<line x1=\"" << svg_number(f.X(b.vertices[0].x)) << "\" y1=\"" << svg_number(f.Y(b.vertices[0].y))
                   << "\" x2=\"" << svg_number(f.X(b.vertices[1].x)) << "\" y2=\"" << svg_number(f.Y(b.vertices[1].y))
                   << "\" stroke-width=\"" << svg_number(2.0 * spec.wall_width) << "\"/>\n";
            } else {
                os << "<polygon points=\"";
                for (std::size_t k = 0; k < b.size(); ++k) {
                    if (k) os << ' ';
                    os << svg_number(f.X(b.vertices[k].x)) << ',' << svg_number(f.Y(b.vertices[k].y));
                }
                os << "\"/>\n";
            }
        }
        os << "</g>\n";
    }

    if (spec.show_dark && ov.illumination) {
        std::size_t n = 0;
        for (const auto& d : ov.illumination->hidden) n += d.dark.size();
        if (n) {
            os << "<g id=\"dark\" stroke=\"" << spec.dark_color << "\" stroke-width=\"" << svg_number(spec.dark_width)
               << "\">\n";
            for (const auto& d : ov.illumination->hidden)
                for (std::size_t k : d.dark) rect(os, f, ov.illumination->grid, k, spec.dark_color);
            os << "</g>\n";
        }
    }

    if (spec.show_walls && !scene.chains.empty()) {
        os << "<g id=\"walls\" fill=\"none\" stroke-width=\"" << svg_number(spec.wall_width)
           << "\" stroke-linejoin=\"round\">\n";
        for (const auto& ch : scene.chains) {
            if (ch.elements.empty()) continue;
            os << "<path stroke=\"" << (ch.role == ChainRole::cap ? spec.cap_color : spec.wall_color) << "\" d=\""
               << chain_path(f, ch) << "\"/>\n";
        }
        os << "</g>\n";
    }

    if (spec.show_trajectories && !ov.trajectories.empty()) {
        os << "<g id=\"trajectories\" fill=\"none\" stroke=\"" << spec.trajectory_color << "\" stroke-width=\""
           << svg_number(spec.trajectory_width) << "\">\n";
        for (const auto& t : ov.trajectories) {
            os << "<polyline points=\"";
            for (std::size_t k = 0; k < t.size(); ++k) {
                if (k) os << ' ';
                os << svg_number(f.X(t[k].x)) << ',' << svg_number(f.Y(t[k].y));
            }
            os << "\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace strbill
