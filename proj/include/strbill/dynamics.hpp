#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "strbill/scene.hpp"

namespace strbill {

constexpr double eps_tan = 1e-10;  // |<v, nu>| below this is a tangency
constexpr double eps_ang = 1e-6;   // tangent mismatch above this makes a junction a corner

struct PhasePoint {
    Vec2 q;
    Vec2 v;
};

struct HitRecord {
    Vec2 point;
    std::size_t chain{0};
    std::size_t element{0};
    double param{0.0};   // segment fraction in [0, 1] or arc angle
    double t{0.0};       // travel distance from the previous point
    Vec2 normal;         // unit normal facing the incoming ray
    double cos_incidence{0.0};  // <v, normal>, negative at a genuine hit
    bool tangency{false};
    bool corner{false};
};

enum class Termination { max_reflections, escaped, singular, corner };

const char* to_string(Termination t);

struct TraceEvent {
    HitRecord hit;
    Vec2 v_out;
};

struct Trajectory {
    PhasePoint start;
    std::vector<TraceEvent> events;
    Termination termination{Termination::max_reflections};
    PhasePoint exit;      // last position and direction; on escape, the point on the bounding circle
    double length{0.0};   // finite flights only, plus the escape flight up to the bounding circle
    std::size_t reflections() const;
};

// Acceleration structure over all scene elements.
struct SceneIndex {
    struct Prim {
        std::uint8_t kind{0};  // 0 segment, 1 arc
        std::uint32_t chain{0};
        std::uint32_t element{0};
        Vec2 a, d;             // segment origin and direction, or arc center and unit axis
        double inv_a{0.0}, inv_b{0.0};
        double sa{0.0}, sb{0.0};
        Vec2 e0, e1;           // unit-circle endpoints of an arc
        double span{0.0};
        Vec2 p0, p1;           // element endpoints in element order
        bool corner0{false}, corner1{false};
    };
    // Four-wide bounding volume hierarchy. Child boxes are stored in float,
    // rounded outward and padded. A child with count > 0 is a leaf holding
    // prims [child, child + count); count == 0 names an inner node; an
    // empty slot has an inverted box.
    struct alignas(16) Node {
        float lox[4], loy[4], hix[4], hiy[4];
        std::uint32_t child[4];
        std::uint32_t count[4];
    };
    std::vector<Prim> prims;
    std::vector<Node> nodes;
    bool root_leaf{false};  // few prims: no nodes; test all prims
    double eps_step{1e-9};
    double snap{1e-9};     // endpoint distance treated as a junction hit
    bool open{false};
    Vec2 center;
    double radius{0.0};
};

std::shared_ptr<const SceneIndex> build_index(const Scene& scene);

Vec2 reflect(const Vec2& v, const Vec2& nu);

// Nearest hit with travel distance above eps_step; nullopt means escape.
std::optional<HitRecord> first_hit(const Scene& scene, const PhasePoint& state);

Trajectory trace(const Scene& scene, const PhasePoint& state, std::size_t max_reflections);

struct TraceSummary {
    Termination termination{Termination::max_reflections};
    std::size_t reflections{0};
    double length{0.0};
};

// Called once per free flight: from, direction and flight length (infinite on escape).
using FlightVisitor = std::function<void(const Vec2& from, const Vec2& dir, double length)>;

// Trace without storing events.
TraceSummary trace_summary(const Scene& scene, const PhasePoint& state, std::size_t max_reflections,
                           const FlightVisitor* visitor = nullptr);

// Per flight: whether it meets H.
std::vector<bool> flight_crossings(const Trajectory& traj, const ConvexBody& body);

}  // namespace strbill
