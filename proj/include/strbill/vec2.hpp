#pragma once

#include <cmath>

namespace strbill {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double X, double Y) : x(X), y(Y) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
// Anticlockwise quarter turn.
constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline double norm(const Vec2& v) { return std::sqrt(v.x * v.x + v.y * v.y); }
constexpr double norm2(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

inline Vec2 normalized(const Vec2& v) {
    const double n = norm(v);
    return n > 0.0 ? v / n : Vec2{};
}

inline Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline double angle_of(const Vec2& v) { return std::atan2(v.y, v.x); }

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Reduce theta into [lo, lo + 2pi).
inline double wrap_from(double theta, double lo) {
    double r = std::fmod(theta - lo, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r -= two_pi;
    return lo + r;
}

// Distance from p to the closed segment ab.
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double dd = norm2(d);
    double t = dd > 0.0 ? dot(p - a, d) / dd : 0.0;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return dist(p, a + d * t);
}

struct Box {
    Vec2 lo{1e300, 1e300};
    Vec2 hi{-1e300, -1e300};

    void add(const Vec2& p) {
        lo.x = std::fmin(lo.x, p.x); lo.y = std::fmin(lo.y, p.y);
        hi.x = std::fmax(hi.x, p.x); hi.y = std::fmax(hi.y, p.y);
    }
    void add(const Box& b) { add(b.lo); add(b.hi); }
    bool empty() const { return lo.x > hi.x; }
    Vec2 center() const { return (lo + hi) * 0.5; }
    Vec2 extent() const { return hi - lo; }
};

}  // namespace strbill
