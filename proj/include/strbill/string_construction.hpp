#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "strbill/convex_body.hpp"
#include "strbill/elements.hpp"

namespace strbill {

struct Mat2 {
    double a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};
    double det() const { return a11 * a22 - a12 * a21; }
    Vec2 col0() const { return {a11, a21}; }
    Vec2 col1() const { return {a12, a22}; }
};

struct HDifferential {
    Mat2 M_lo;  // built with t = lower end of t(theta)
    Mat2 M_hi;  // built with t = upper end
    bool single() const {
        return M_lo.a11 == M_hi.a11 && M_lo.a12 == M_hi.a12 && M_lo.a21 == M_hi.a21 && M_lo.a22 == M_hi.a22;
    }
};

struct PotentialEval {
    double phi{0.0};
    TangentFrame frame;
    Vec2 grad;
};

// p(u, theta) = h(t) + (u - t)(cos theta, sin theta) for t in t(theta).
Vec2 rope_point(const ConvexBody& body, double u, double theta);
// Throws std::domain_error when u lies in t(theta).
HDifferential h_differential(const ConvexBody& body, double u, double theta);
PotentialEval potential(const ConvexBody& body, const Vec2& p);

struct TableBoundary {
    std::vector<EllipticArc> arcs;
    double lam{0.0};
    ConvexBody body;
    double total_len{0.0};
    std::vector<double> offsets;  // arc start positions along the boundary, arcs.size() + 1 entries

    double level() const { return 2.0 * lam + body.L; }
};

// Closed chain of elliptic arcs forming the level set phi = 2 lam + L.
TableBoundary level_curve(const ConvexBody& body, double lam);

struct BoundaryPoint {
    Vec2 point;
    Vec2 normal;  // inward unit normal
    double curvature{0.0};
    // At a junction: curvature on the incoming side; equal to curvature elsewhere.
    double curvature_before{0.0};
    std::size_t arc{0};
    double s{0.0};
    bool at_junction{false};
};

BoundaryPoint boundary_eval(const TableBoundary& table, double tau);
// Boundary parameter of the chain point nearest to p.
double locate(const TableBoundary& table, const Vec2& p);
double min_distance(const TableBoundary& table);

// Curvature of a point on the ellipse with foci f1, f2 from focal data.
double focal_curvature(const Vec2& p, const Vec2& f1, const Vec2& f2);
// Outward (unnormalized) gradient of |p - f1| + |p - f2|.
Vec2 focal_gradient(const Vec2& p, const Vec2& f1, const Vec2& f2);

double arc_length(const EllipticArc& arc, double s_from, double s_to);

// Anticlockwise sweep over tangent-vertex pairs. Vertex indices are unwrapped
// (vertex k means body.vertex(k)); the arc for the pair (i, j) has foci
// vertex(i) (T_plus side) and vertex(j) (T_minus side) and two_a = 2 lam +
// arc length from i to j.
struct SweepArc {
    EllipticArc arc;
    std::ptrdiff_t i_plus{0};
    std::ptrdiff_t i_minus{0};
};

// Essential curve around the CCW boundary arc from vertex b to vertex a
// (a reached after m edges), starting at B' = B - lam u(theta_B) and ending
// at A' = A + lam u(theta_A). Tangent points are clamped to A and B.
std::vector<SweepArc> essential_sweep(const ConvexBody& body, double lam, std::size_t b, std::size_t m,
                                      double theta_a, double theta_b);

std::vector<Vec2> sample_arc(const EllipticArc& arc, int k);

}  // namespace strbill
