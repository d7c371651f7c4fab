#include "strbill/classification.hpp"

#include <stdexcept>

#include "strbill/parallel.hpp"

namespace strbill {

namespace {

void require_open(const Scene& scene) {
    if (scene.kind != SceneKind::open_obstacles)
        throw std::invalid_argument("escape is undefined in a closed scene; classification needs open obstacles");
}

PointLabel label_of(std::size_t trapped, std::size_t n) {
    if (trapped == 0) return PointLabel::free;
    if (trapped == n) return PointLabel::hidden;
    return PointLabel::mixed;
}

// Cells whose closed square meets H.
std::vector<std::size_t> body_cells(const GridSpec& g, const ConvexBody& body) {
    std::vector<std::uint8_t> mark(g.size(), 0);
    const auto set = [&](std::size_t k) { mark[k] = 1; };
    const std::size_t n = body.size();
    if (n == 1) {
        supercover(g, body.vertices[0], {1.0, 0.0}, 0.0, set);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = body.vertices[i], b = body.vertex(static_cast<std::ptrdiff_t>(i) + 1);
            supercover(g, a, b - a, 1.0, set);
        }
        if (body.kind == BodyKind::polygon)
            for (std::size_t k = 0; k < g.size(); ++k)
                if (contains(body, g.center(k)) != Containment::outside) mark[k] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (mark[k]) out.push_back(k);
    return out;
}

}  // namespace

const char* to_string(Outcome o) { return o == Outcome::escapes ? "escapes" : "trapped_at_cutoff"; }

const char* to_string(PointLabel l) {
    switch (l) {
        case PointLabel::free: return "free";
        case PointLabel::mixed: return "mixed";
        case PointLabel::hidden: return "hidden";
    }
    return "?";
}

DirectionClassification classify_state(const Scene& scene, const PhasePoint& state, std::size_t cutoff) {
    require_open(scene);
    const TraceSummary t = trace_summary(scene, state, cutoff);
    DirectionClassification c;
    c.termination = t.termination;
    c.length = t.length;
    if (t.termination == Termination::escaped) {
        c.outcome = Outcome::escapes;
        c.reflections = t.reflections;
    } else {
        c.outcome = Outcome::trapped_at_cutoff;
        c.reflections = cutoff;
    }
    return c;
}

std::vector<Vec2> stratified_directions(std::uint64_t seed, std::size_t n) {
    std::vector<Vec2> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = substream(seed, k).uniform();
        out[k] = unit(two_pi * (static_cast<double>(k) + u) / static_cast<double>(n));
    }
    return out;
}

PointClass classify_point(const Scene& scene, const Vec2& q, std::size_t n_dirs, std::size_t cutoff,
                          std::uint64_t seed) {
    require_open(scene);
    if (n_dirs == 0) throw std::invalid_argument("classify_point needs at least one direction");
    if (in_forbidden(scene, q)) throw std::invalid_argument("classify_point: q lies inside an obstacle");
    PointClass pc;
    pc.q = q;
    pc.n_samples = n_dirs;
    pc.seed = seed;
    pc.cutoff = cutoff;
    for (const Vec2& v : stratified_directions(seed, n_dirs)) {
        const DirectionClassification c = classify_state(scene, {q, v}, cutoff);
        if (c.outcome == Outcome::trapped_at_cutoff) ++pc.trapped;
        if (c.stopped()) ++pc.stopped;
    }
    pc.trapped_fraction = static_cast<double>(pc.trapped) / static_cast<double>(n_dirs);
    pc.label = label_of(pc.trapped, n_dirs);
    return pc;
}

GridSpec grid_over(const Box& box, std::size_t nx, std::size_t ny) {
    if (nx == 0 || ny == 0) throw std::invalid_argument("grid needs at least one cell per axis");
    if (box.empty() || !(box.hi.x > box.lo.x) || !(box.hi.y > box.lo.y))
        throw std::invalid_argument("grid box must have positive extent");
    GridSpec g;
    g.origin = box.lo;
    g.cell = {(box.hi.x - box.lo.x) / static_cast<double>(nx), (box.hi.y - box.lo.y) / static_cast<double>(ny)};
    g.nx = nx;
    g.ny = ny;
    return g;
}

std::size_t RegionScan::count(PointLabel l) const {
    std::size_t n = 0;
    for (const auto& c : cells)
        if (c && c->label == l) ++n;
    return n;
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell) { return substream(seed, cell).next(); }

RegionScan scan_region(const Scene& scene, const GridSpec& grid, std::size_t n_dirs, std::size_t cutoff,
                       std::uint64_t seed, unsigned threads) {
    require_open(scene);
    RegionScan out;
    out.grid = grid;
    out.n_dirs = n_dirs;
    out.cutoff = cutoff;
    out.seed = seed;
    out.cells.resize(grid.size());
    parallel_for(grid.size(), threads, 1, [&](std::size_t k, unsigned) {
        const Vec2 q = grid.center(k);
        if (in_forbidden(scene, q)) return;
        out.cells[k] = classify_point(scene, q, n_dirs, cutoff, cell_seed(seed, k));
    });
    for (const auto& c : out.cells)
        if (c) {
            out.samples += c->n_samples;
            out.stopped += c->stopped;
        }
    return out;
}

std::optional<std::pair<Vec2, Vec2>> clip_to_body(const ConvexBody& body, const Vec2& a, const Vec2& b) {
    if (!segment_crosses_body(body, a, b)) return std::nullopt;
    if (body.kind == BodyKind::point) return std::pair{body.vertices[0], body.vertices[0]};
    if (body.kind == BodyKind::segment) {
        // Closest point of H to the flight; a collinear overlap keeps its extent.
        const Vec2 p = body.vertices[0], q = body.vertices[1];
        const Vec2 e = q - p, d = b - a;
        if (std::fabs(cross(normalized(e), d)) <= body.eps && std::fabs(cross(normalized(e), a - p)) <= body.eps) {
            const double ee = norm2(e);
            const double s0 = std::clamp(dot(a - p, e) / ee, 0.0, 1.0), s1 = std::clamp(dot(b - p, e) / ee, 0.0, 1.0);
            return std::pair{p + e * s0, p + e * s1};
        }
        const double den = cross(e, d);
        if (den != 0.0) {
            const double s = std::clamp(cross(a - p, d) / den, 0.0, 1.0);
            const Vec2 h = p + e * s;
            return std::pair{h, h};
        }
        return std::pair{p, p};
    }
    // Cyrus-Beck against the anticlockwise polygon, widened by eps.
    double t0 = 0.0, t1 = 1.0;
    const Vec2 d = b - a;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const Vec2 v = body.vertices[i];
        const Vec2 nrm = perp(body.edge_dir[i]);  // inward
        const double num = dot(a - v, nrm) + body.eps, den = dot(d, nrm);
        if (den == 0.0) {
            if (num < 0.0) return std::pair{a, a};
            continue;
        }
        const double t = -num / den;
        if (den > 0.0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
    }
    if (t0 > t1) {
        const double t = 0.5 * (t0 + t1);
        return std::pair{a + d * t, a + d * t};
    }
    return std::pair{a + d * t0, a + d * t1};
}

std::vector<Vec2> candle_directions(std::uint64_t seed, std::size_t n) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    const double u0 = SplitMix64{seed}.uniform();
    std::vector<Vec2> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double f = u0 + static_cast<double>(k) * g;
        f -= std::floor(f);
        out[k] = unit(two_pi * f);
    }
    return out;
}

std::size_t IlluminationMap::visited() const {
    std::size_t n = 0;
    for (auto c : counts)
        if (c > 0) ++n;
    return n;
}

IlluminationMap illuminate(const Scene& scene, const Vec2& candle, std::size_t n_rays, std::size_t cutoff,
                           const GridSpec& grid, std::uint64_t seed, unsigned threads) {
    if (scene.kind == SceneKind::open_obstacles)
        throw std::invalid_argument("illuminate needs a room or a closed table");
    if (in_forbidden(scene, candle)) throw std::invalid_argument("candle outside the room or inside a cap");
    if (grid.size() == 0) throw std::invalid_argument("illumination grid is empty");

    IlluminationMap map;
    map.grid = grid;
    map.candle = candle;
    map.n_rays = n_rays;
    map.cutoff = cutoff;
    map.seed = seed;
    map.counts.assign(grid.size(), 0);
    map.exterior.assign(grid.size(), 0);

    const std::size_t nb = scene.bodies.size();
    std::vector<std::uint8_t> on_body(grid.size(), 0);
    std::vector<std::vector<std::size_t>> region(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        region[b] = body_cells(grid, scene.bodies[b]);
        for (std::size_t k : region[b]) on_body[k] = 1;
    }
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (!on_body[k] && in_forbidden(scene, grid.center(k))) map.exterior[k] = 1;

    const std::vector<Vec2> dirs = candle_directions(seed, n_rays);
    const unsigned workers = thread_count(threads);
    struct Local {
        std::vector<std::uint32_t> counts;
        std::vector<std::vector<std::uint32_t>> body_hits;
        std::vector<std::uint32_t> stamp;
        std::uint32_t flight{0};
        std::size_t stopped{0};
    };
    std::vector<Local> locals(workers);
    for (auto& l : locals) {
        l.counts.assign(grid.size(), 0);
        l.body_hits.assign(nb, std::vector<std::uint32_t>(grid.size(), 0));
        l.stamp.assign(grid.size(), 0);
    }
    parallel_for(n_rays, threads, 64, [&](std::size_t r, unsigned w) {
        Local& l = locals[w];
        const FlightVisitor visit = [&](const Vec2& from, const Vec2& dir, double len) {
            supercover(grid, from, dir, len, [&](std::size_t k) { ++l.counts[k]; });
            if (!std::isfinite(len)) return;
            const Vec2 to = from + dir * len;
            for (std::size_t b = 0; b < nb; ++b) {
                const auto piece = clip_to_body(scene.bodies[b], from, to);
                if (!piece) continue;
                // One hit per cell per flight even when the clipped piece is a point.
                ++l.flight;
                const Vec2 pd = piece->second - piece->first;
                supercover(grid, piece->first, pd, 1.0, [&](std::size_t k) {
                    if (l.stamp[k] == l.flight) return;
                    l.stamp[k] = l.flight;
                    ++l.body_hits[b][k];
                });
            }
        };
        const TraceSummary t = trace_summary(scene, {candle, dirs[r]}, cutoff, &visit);
        if (t.termination == Termination::singular || t.termination == Termination::corner) ++l.stopped;
    });

    std::vector<std::vector<std::uint32_t>> hits(nb, std::vector<std::uint32_t>(grid.size(), 0));
    for (const auto& l : locals) {
        for (std::size_t k = 0; k < grid.size(); ++k) map.counts[k] += l.counts[k];
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t k = 0; k < grid.size(); ++k) hits[b][k] += l.body_hits[b][k];
        map.stopped += l.stopped;
    }
    for (std::size_t b = 0; b < nb; ++b) {
        DarkRegion d;
        d.name = b < scene.body_names.size() ? scene.body_names[b] : "H" + std::to_string(b + 1);
        d.cells = region[b];
        for (std::size_t k : d.cells) {
            d.hits.push_back(hits[b][k]);
            if (hits[b][k] == 0) d.dark.push_back(k);
        }
        map.hidden.push_back(std::move(d));
    }
    return map;
}

}  // namespace strbill
