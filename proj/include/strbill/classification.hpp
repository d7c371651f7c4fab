#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strbill/dynamics.hpp"
#include "strbill/scene.hpp"

namespace strbill {

enum class Outcome { escapes, trapped_at_cutoff };
enum class PointLabel { free, mixed, hidden };

const char* to_string(Outcome o);
const char* to_string(PointLabel l);

struct DirectionClassification {
    Outcome outcome{Outcome::trapped_at_cutoff};
    std::size_t reflections{0};  // reflections before escape, or the cutoff
    double length{0.0};
    Termination termination{Termination::max_reflections};
    // Singular and corner terminations count as trapped and are flagged here.
    bool stopped() const { return termination == Termination::singular || termination == Termination::corner; }
};

// Escape test for an open scene with at most `cutoff` reflections.
DirectionClassification classify_state(const Scene& scene, const PhasePoint& state, std::size_t cutoff);

// Directions 2pi (k + u_k) / n with u_k uniform from substream (seed, k).
std::vector<Vec2> stratified_directions(std::uint64_t seed, std::size_t n);

struct PointClass {
    Vec2 q;
    std::size_t n_samples{0};
    std::size_t trapped{0};
    std::size_t stopped{0};  // singular or corner terminations (included in trapped)
    double trapped_fraction{0.0};
    PointLabel label{PointLabel::free};
    std::uint64_t seed{0};
    std::size_t cutoff{0};
};

PointClass classify_point(const Scene& scene, const Vec2& q, std::size_t n_dirs, std::size_t cutoff,
                          std::uint64_t seed);

// Axis-aligned raster: cell (i, j) covers origin + (i, j) * cell to origin + (i + 1, j + 1) * cell.
struct GridSpec {
    Vec2 origin;
    Vec2 cell{1.0, 1.0};
    std::size_t nx{0};
    std::size_t ny{0};

    std::size_t size() const { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
    Vec2 center(std::size_t i, std::size_t j) const {
        return {origin.x + (static_cast<double>(i) + 0.5) * cell.x, origin.y + (static_cast<double>(j) + 0.5) * cell.y};
    }
    Vec2 center(std::size_t k) const { return center(k % nx, k / nx); }
    bool operator==(const GridSpec&) const = default;
};

// nx x ny grid covering the box exactly.
GridSpec grid_over(const Box& box, std::size_t nx, std::size_t ny);

struct RegionScan {
    GridSpec grid;
    std::vector<std::optional<PointClass>> cells;  // empty for cells inside obstacles
    std::size_t n_dirs{0};
    std::size_t cutoff{0};
    std::uint64_t seed{0};
    std::size_t samples{0};
    std::size_t stopped{0};
    std::size_t count(PointLabel l) const;
    double stopped_rate() const { return samples ? static_cast<double>(stopped) / static_cast<double>(samples) : 0.0; }
};

// classify_point at every free cell center; cell k uses the seed of substream (seed, k).
RegionScan scan_region(const Scene& scene, const GridSpec& grid, std::size_t n_dirs, std::size_t cutoff,
                       std::uint64_t seed, unsigned threads = 0);

// Per-cell seed used by scan_region.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell);

// Calls visit(k) for every cell whose closed square meets the closed segment
// a-b (conservative: touching an edge or corner counts). b may be at infinity
// along a finite direction; the segment is clipped to the grid first.
template <class F>
void supercover(const GridSpec& g, const Vec2& a, const Vec2& d, double len, F&& visit);

struct DarkRegion {
    std::string name;
    std::vector<std::size_t> cells;    // cells meeting H minus the forbidden set
    std::vector<std::uint32_t> hits;  // per region cell: flights meeting H inside that cell
    std::vector<std::size_t> dark;     // region cells with zero hits
    bool all_dark() const { return !cells.empty() && dark.size() == cells.size(); }
};

struct IlluminationMap {
    GridSpec grid;
    std::vector<std::uint32_t> counts;  // flights whose segment meets the cell
    std::vector<std::uint8_t> exterior;  // forbidden centers not on any hidden body
    Vec2 candle;
    std::size_t n_rays{0};
    std::size_t cutoff{0};
    std::uint64_t seed{0};
    std::size_t stopped{0};
    std::vector<DarkRegion> hidden;
    std::size_t visited() const;
};

// Prefix-stable directions: angle 2pi frac(u0 + k (sqrt 5 - 1) / 2), u0 from the seed.
std::vector<Vec2> candle_directions(std::uint64_t seed, std::size_t n);

// Traces n_rays candle rays in a room or closed table and rasterizes every flight.
IlluminationMap illuminate(const Scene& scene, const Vec2& candle, std::size_t n_rays, std::size_t cutoff,
                           const GridSpec& grid, std::uint64_t seed, unsigned threads = 0);

// Points of the closed segment a-b nearest to or inside H, or nothing when
// the segment misses H by more than eps.
std::optional<std::pair<Vec2, Vec2>> clip_to_body(const ConvexBody& body, const Vec2& a, const Vec2& b);

// ---------------------------------------------------------------------------

template <class F>
void supercover(const GridSpec& g, const Vec2& a, const Vec2& d, double len, F&& visit) {
    if (g.nx == 0 || g.ny == 0) return;
    // Work in grid units.
    const double ox = (a.x - g.origin.x) / g.cell.x, oy = (a.y - g.origin.y) / g.cell.y;
    const double dx = d.x / g.cell.x, dy = d.y / g.cell.y;
    const double W = static_cast<double>(g.nx), H = static_cast<double>(g.ny);
    // Liang-Barsky clip of t in [0, len] to [0, W] x [0, H].
    double t0 = 0.0, t1 = len;
    auto clip = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        const double r = q / p;
        if (p < 0.0) {
            if (r > t1) return false;
            t0 = std::max(t0, r);
        } else {
            if (r < t0) return false;
            t1 = std::min(t1, r);
        }
        return true;
    };
    if (!clip(-dx, ox) || !clip(dx, W - ox) || !clip(-dy, oy) || !clip(dy, H - oy)) return;
    if (!(t0 <= t1) || !std::isfinite(t1)) return;
    const double x0 = ox + dx * t0, y0 = oy + dy * t0, x1 = ox + dx * t1, y1 = oy + dy * t1;
    constexpr double slack = 1e-9;
    // Exact floor and ceil by truncation; libm calls dominate otherwise.
    const auto ifloor = [](double v) {
        const long i = static_cast<long>(v);
        return v < static_cast<double>(i) ? i - 1 : i;
    };
    const auto iceil = [](double v) {
        const long i = static_cast<long>(v);
        return v > static_cast<double>(i) ? i + 1 : i;
    };
    // Strips across the axis of smaller extent, runs of cells along the other.
    const auto sweep = [&](double u0, double v0, double u1, double v1, long nu, long nv, auto&& cell) {
        if (u0 > u1) {
            std::swap(u0, u1);
            std::swap(v0, v1);
        }
        const long lo = std::max(0L, iceil(u0 - slack) - 1);
        const long hi = std::min(nu - 1, ifloor(u1 + slack));
        const double slope = u1 > u0 ? (v1 - v0) / (u1 - u0) : 0.0;
        for (long i = lo; i <= hi; ++i) {
            double va = v0, vb = v1;
            if (u1 > u0) {
                const double ua = std::max(u0, static_cast<double>(i)), ub = std::min(u1, static_cast<double>(i + 1));
                va = v0 + (ua - u0) * slope;
                vb = v0 + (ub - u0) * slope;
            }
            if (va > vb) std::swap(va, vb);
            const long run_lo = std::max(0L, iceil(va - slack) - 1);
            const long run_hi = std::min(nv - 1, ifloor(vb + slack));
            for (long j = run_lo; j <= run_hi; ++j) cell(i, j);
        }
    };
    const long nx = static_cast<long>(g.nx), ny = static_cast<long>(g.ny);
    if (std::fabs(y1 - y0) < std::fabs(x1 - x0))
        sweep(y0, x0, y1, x1, ny, nx, [&](long j, long i) { visit(static_cast<std::size_t>(j * nx + i)); });
    else
        sweep(x0, y0, x1, y1, nx, ny, [&](long i, long j) { visit(static_cast<std::size_t>(j * nx + i)); });
}

}  // namespace strbill
