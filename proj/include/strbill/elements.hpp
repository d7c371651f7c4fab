#pragma once

#include <variant>
#include <vector>

#include "strbill/vec2.hpp"

namespace strbill {

struct LineSegment {
    Vec2 a;
    Vec2 b;

    Vec2 point(double t) const { return a + (b - a) * t; }
    double length() const { return dist(a, b); }
    bool operator==(const LineSegment&) const = default;
};

// Anticlockwise arc of the ellipse |p - f1| + |p - f2| = two_a. In the
// canonical frame (center c, unit major axis u, minor axis perp(u)) the arc is
// c + a cos(s) u + b sin(s) perp(u) for s in [s0, s1], s1 > s0. f1 == f2 gives
// a circle with u = (1, 0).
struct EllipticArc {
    Vec2 f1;
    Vec2 f2;
    double two_a{0.0};
    double s0{0.0};
    double s1{0.0};

    Vec2 center() const { return (f1 + f2) * 0.5; }
    Vec2 axis() const {
        const Vec2 d = f1 - f2;
        return norm2(d) > 0.0 ? normalized(d) : Vec2{1.0, 0.0};
    }
    double semi_major() const { return 0.5 * two_a; }
    double semi_minor() const {
        const double a = semi_major(), c = 0.5 * dist(f1, f2);
        return std::sqrt(std::fmax(a * a - c * c, 0.0));
    }
    double span() const { return s1 - s0; }

    Vec2 point(double s) const {
        const Vec2 u = axis();
        return center() + u * (semi_major() * std::cos(s)) + perp(u) * (semi_minor() * std::sin(s));
    }
    // Derivative of point(s) with respect to s.
    Vec2 velocity(double s) const {
        const Vec2 u = axis();
        return u * (-semi_major() * std::sin(s)) + perp(u) * (semi_minor() * std::cos(s));
    }
    Vec2 tangent(double s) const { return normalized(velocity(s)); }
    Vec2 start() const { return point(s0); }
    Vec2 end() const { return point(s1); }

    // Canonical angle of a point near the ellipse, in [s0, s0 + 2pi).
    double param_of(const Vec2& p) const {
        const Vec2 u = axis();
        const Vec2 r = p - center();
        const double s = std::atan2(dot(r, perp(u)) / semi_minor(), dot(r, u) / semi_major());
        return wrap_from(s, s0);
    }

    bool operator==(const EllipticArc&) const = default;
};

using Element = std::variant<LineSegment, EllipticArc>;

// An element together with its traversal direction inside a chain.
struct ChainElement {
    Element geom;
    bool reversed{false};

    Vec2 start() const;
    Vec2 end() const;
    // Unit tangents in traversal direction.
    Vec2 start_tangent() const;
    Vec2 end_tangent() const;
    bool operator==(const ChainElement&) const = default;
};

Box element_bounds(const Element& e);
double element_length(const Element& e);
// Points along the element in its own (not traversal) direction; arcs use at
// least min_pieces chords and at most max_angle radians per chord.
std::vector<Vec2> flatten(const Element& e, double max_angle = pi / 32, int min_pieces = 4);
// All ray parameters t > t_min with o + t d on the element (d need not be unit).
int ray_hits(const Element& e, const Vec2& o, const Vec2& d, double t_min, double out[2]);

}  // namespace strbill
