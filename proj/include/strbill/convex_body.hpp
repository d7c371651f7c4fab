#pragma once

#include <cstddef>
#include <vector>

#include "strbill/vec2.hpp"

namespace strbill {

enum class BodyKind { polygon, segment, point };

const char* to_string(BodyKind k);

// Closed interval of tangent angles (radians, unwrapped frame).
struct AngleInterval {
    double lo{0.0};
    double hi{0.0};
};

// Closed interval of arc-length parameters in [0, L].
struct ParamInterval {
    double lo{0.0};
    double hi{0.0};
    bool singleton() const { return lo == hi; }
    bool contains(double t, double tol = 0.0) const { return t >= lo - tol && t <= hi + tol; }
};

enum class Containment { inside, boundary, outside };

// Convex body H, stored as an anticlockwise polygon. A segment is a 2-gon whose
// boundary runs along both sides; a point has a single vertex and L = 0.
//
// Arc length t = 0 sits at vertex 0, the lowest (then leftmost) vertex. Edge i
// runs from vertex i to vertex i+1. Tangent angles live in the frame
// [theta0, theta0 + 2pi) with theta0 = direction of edge 0.
struct ConvexBody {
    BodyKind kind{BodyKind::point};
    std::vector<Vec2> vertices;
    std::vector<double> cum_len;     // n + 1 entries, cum_len[n] == L
    std::vector<double> edge_angle;  // unwrapped, edge_angle[0] = theta0
    std::vector<Vec2> edge_dir;      // unit edge directions
    double L{0.0};
    std::size_t base_index{0};
    double diameter{0.0};
    double eps{1e-9};                // geometric tolerance eps_g

    std::size_t size() const { return vertices.size(); }
    const Vec2& vertex(std::ptrdiff_t i) const;
    double theta0() const { return edge_angle.empty() ? 0.0 : edge_angle.front(); }
    // Exterior (turning) angle at vertex i, in (0, pi].
    double turn(std::size_t i) const;
    // Centroid of the vertices; used as a reference interior point.
    Vec2 centroid() const;
    Box bounds() const;
};

ConvexBody make_body(const std::vector<Vec2>& points);

Vec2 point_at(const ConvexBody& body, double t);
AngleInterval turning_angle(const ConvexBody& body, double t);
// Turning interval at vertex i (the corner interval; vertex 0 uses theta0 - turn0).
AngleInterval vertex_turning(const ConvexBody& body, std::size_t i);
ParamInterval param_of_angle(const ConvexBody& body, double theta);

struct TangentFrame {
    Vec2 p;
    double theta_minus{0.0};
    double theta_plus{0.0};
    Vec2 T_minus;
    Vec2 T_plus;
    ParamInterval t_minus;
    ParamInterval t_plus;
    double u_minus{0.0};
    double u_plus{0.0};
    std::size_t i_minus{0};  // vertex index of T_minus
    std::size_t i_plus{0};   // vertex index of T_plus
    bool degenerate{false};  // p on the boundary of H
};

// Supporting rays through an exterior point. The ray from T_plus reaches p
// along (cos theta_plus, sin theta_plus); the ray from p reaches T_minus along
// (cos theta_minus, sin theta_minus). Throws std::domain_error inside H.
TangentFrame supporting_rays(const ConvexBody& body, const Vec2& p);

Containment contains(const ConvexBody& body, const Vec2& p);
bool segment_crosses_body(const ConvexBody& body, const Vec2& a, const Vec2& b);

// Euclidean distance from p to H (0 inside).
double distance_to_body(const ConvexBody& body, const Vec2& p);
// Distance from p to the boundary of H.
double distance_to_boundary(const ConvexBody& body, const Vec2& p);

// Signed depth of the line through q with direction d: positive when the line
// separates vertices of H, zero when it supports H, minus the gap otherwise.
double line_depth(const ConvexBody& body, const Vec2& q, const Vec2& d);

// Arc length from parameter t1 anticlockwise to t2, in [0, L).
double arc_ccw(const ConvexBody& body, double t1, double t2);

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace strbill
