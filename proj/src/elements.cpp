#include "strbill/elements.hpp"

#include <algorithm>
#include <cmath>

namespace strbill {

namespace {

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

}  // namespace

Vec2 ChainElement::start() const {
    return std::visit(overloaded{[&](const LineSegment& s) { return reversed ? s.b : s.a; },
                                 [&](const EllipticArc& a) { return reversed ? a.end() : a.start(); }},
                      geom);
}

Vec2 ChainElement::end() const {
    return std::visit(overloaded{[&](const LineSegment& s) { return reversed ? s.a : s.b; },
                                 [&](const EllipticArc& a) { return reversed ? a.start() : a.end(); }},
                      geom);
}

Vec2 ChainElement::start_tangent() const {
    return std::visit(overloaded{[&](const LineSegment& s) { return normalized(reversed ? s.a - s.b : s.b - s.a); },
                                 [&](const EllipticArc& a) { return reversed ? -a.tangent(a.s1) : a.tangent(a.s0); }},
                      geom);
}

Vec2 ChainElement::end_tangent() const {
    return std::visit(overloaded{[&](const LineSegment& s) { return normalized(reversed ? s.a - s.b : s.b - s.a); },
                                 [&](const EllipticArc& a) { return reversed ? -a.tangent(a.s0) : a.tangent(a.s1); }},
                      geom);
}

std::vector<Vec2> flatten(const Element& e, double max_angle, int min_pieces) {
    return std::visit(overloaded{[](const LineSegment& s) { return std::vector<Vec2>{s.a, s.b}; },
                                 [&](const EllipticArc& a) {
                                     const int k = std::max(min_pieces, static_cast<int>(std::ceil(a.span() / max_angle)));
                                     std::vector<Vec2> pts;
                                     pts.reserve(static_cast<std::size_t>(k) + 1);
                                     for (int i = 0; i <= k; ++i) pts.push_back(a.point(a.s0 + a.span() * i / k));
                                     pts.back() = a.end();
                                     return pts;
                                 }},
                      e);
}

Box element_bounds(const Element& e) {
    Box b;
    std::visit(overloaded{[&](const LineSegment& s) {
                              b.add(s.a);
                              b.add(s.b);
                          },
                          [&](const EllipticArc& a) {
                              b.add(a.start());
                              b.add(a.end());
                              // Axis-aligned extremes of the full ellipse that lie on the arc.
                              const Vec2 u = a.axis(), v = perp(u);
                              const double A = a.semi_major(), B = a.semi_minor();
                              const double sx = std::atan2(-B * v.x, -A * u.x);
                              const double sy = std::atan2(-B * v.y, -A * u.y);
                              for (double base : {sx, sy}) {
                                  for (double s : {base, base + pi}) {
                                      const double w = wrap_from(s, a.s0);
                                      if (w <= a.s1) b.add(a.point(w));
                                  }
                              }
                          }},
               e);
    return b;
}

double element_length(const Element& e) {
    return std::visit(overloaded{[](const LineSegment& s) { return s.length(); },
                                 [](const EllipticArc& a) {
                                     const auto pts = flatten(a, pi / 256, 16);
                                     double len = 0.0;
                                     for (std::size_t i = 1; i < pts.size(); ++i) len += dist(pts[i - 1], pts[i]);
                                     return len;
                                 }},
                      e);
}

int ray_hits(const Element& e, const Vec2& o, const Vec2& d, double t_min, double out[2]) {
    return std::visit(
        overloaded{[&](const LineSegment& s) {
                       const Vec2 w = s.b - s.a;
                       const double den = cross(d, w);
                       if (den == 0.0) return 0;
                       const Vec2 r = s.a - o;
                       const double t = cross(r, w) / den;
                       const double q = cross(r, d) / den;
                       if (t > t_min && q >= 0.0 && q <= 1.0) {
                           out[0] = t;
                           return 1;
                       }
                       return 0;
                   },
                   [&](const EllipticArc& a) {
                       const Vec2 u = a.axis(), v = perp(u);
                       const double A = a.semi_major(), B = a.semi_minor();
                       const Vec2 r = o - a.center();
                       const Vec2 oc{dot(r, u) / A, dot(r, v) / B};
                       const Vec2 dc{dot(d, u) / A, dot(d, v) / B};
                       const double qa = norm2(dc), qb = dot(oc, dc), qc = norm2(oc) - 1.0;
                       const double disc = qb * qb - qa * qc;
                       if (qa == 0.0 || disc < 0.0) return 0;
                       const double sq = std::sqrt(disc);
                       const double qq = qb >= 0.0 ? -(qb + sq) : -(qb - sq);
                       double roots[2] = {qq / qa, qq != 0.0 ? qc / qq : -qq / qa};
                       if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
                       int n = 0;
                       for (int k = 0; k < 2; ++k) {
                           const double t = roots[k];
                           if (!(t > t_min)) continue;
                           if (k == 1 && n == 1 && t == out[0]) continue;
                           const Vec2 pc = oc + dc * t;
                           const double s = wrap_from(std::atan2(pc.y, pc.x), a.s0);
                           const bool wrap_end = s > a.s1 && s - two_pi >= a.s0 - 1e-15;
                           if (s <= a.s1 || wrap_end) out[n++] = t;
                       }
                       return n;
                   }},
        e);
}

}  // namespace strbill
