#include "strbill/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace strbill {

namespace {

// Angles closer than this to an edge direction are treated as that direction.
constexpr double angle_snap = 1e-12;

double hull_cross(const Vec2& o, const Vec2& a, const Vec2& b) { return cross(a - o, b - o); }

std::vector<Vec2> monotone_chain(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && hull_cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && hull_cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

// Drop near-duplicate and near-collinear vertices until stable.
void simplify_hull(std::vector<Vec2>& h, double eps) {
    bool changed = true;
    while (changed && h.size() > 2) {
        changed = false;
        const std::size_t n = h.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& prev = h[(i + n - 1) % n];
            const Vec2& cur = h[i];
            const Vec2& next = h[(i + 1) % n];
            bool drop = dist(cur, next) < eps;
            if (!drop) {
                const double base = dist(prev, next);
                drop = base > 0.0 && std::fabs(hull_cross(prev, cur, next)) / base < eps;
            }
            if (drop) {
                h.erase(h.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    if (h.size() == 2 && dist(h[0], h[1]) < eps) h.resize(1);
}

double max_pairwise(const std::vector<Vec2>& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, dist(v[i], v[j]));
    return d;
}

double wrap_len(double t, double L) {
    if (L <= 0.0) return 0.0;
    double r = std::fmod(t, L);
    if (r < 0.0) r += L;
    if (r >= L) r -= L;
    return r;
}

void require_extent(const ConvexBody& body, const char* what) {
    if (body.kind == BodyKind::point)
        throw std::invalid_argument(std::string(what) + ": point body has no tangent direction");
}

}  // namespace

const char* to_string(BodyKind k) {
    switch (k) {
        case BodyKind::polygon: return "polygon";
        case BodyKind::segment: return "segment";
        case BodyKind::point: return "point";
    }
    return "?";
}

const Vec2& ConvexBody::vertex(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(vertices.size());
    i %= n;
    if (i < 0) i += n;
    return vertices[static_cast<std::size_t>(i)];
}

double ConvexBody::turn(std::size_t i) const {
    if (kind == BodyKind::point) return two_pi;
    const std::size_t n = size();
    if (i == 0) return theta0() + two_pi - edge_angle[n - 1];
    return edge_angle[i] - edge_angle[i - 1];
}

Vec2 ConvexBody::centroid() const {
    Vec2 c;
    for (const auto& v : vertices) c += v;
    return c / static_cast<double>(vertices.size());
}

Box ConvexBody::bounds() const {
    Box b;
    for (const auto& v : vertices) b.add(v);
    return b;
}

ConvexBody make_body(const std::vector<Vec2>& points) {
    if (points.empty()) throw std::invalid_argument("make_body: empty point list");
    Box box;
    for (const auto& p : points) {
        if (!is_finite(p)) throw std::invalid_argument("make_body: non-finite coordinate");
        box.add(p);
    }
    const double eps0 = 1e-9 * (1.0 + norm(box.extent()));

    std::vector<Vec2> hull = monotone_chain(points);
    simplify_hull(hull, eps0);

    ConvexBody body;
    body.diameter = max_pairwise(hull);
    body.eps = 1e-9 * (1.0 + body.diameter);
    if (hull.size() == 1 || body.diameter < body.eps) {
        body.kind = BodyKind::point;
        body.vertices = {hull.front()};
        body.cum_len = {0.0, 0.0};
        body.diameter = 0.0;
        return body;
    }

    // Rotate so vertex 0 is the lowest, then leftmost.
    std::size_t base = 0;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        const Vec2& a = hull[i];
        const Vec2& b = hull[base];
        if (a.y < b.y || (a.y == b.y && a.x < b.x)) base = i;
    }
    std::rotate(hull.begin(), hull.begin() + static_cast<std::ptrdiff_t>(base), hull.end());
    body.vertices = std::move(hull);
    body.base_index = 0;
    body.kind = body.vertices.size() == 2 ? BodyKind::segment : BodyKind::polygon;

    const std::size_t n = body.vertices.size();
    body.cum_len.assign(n + 1, 0.0);
    body.edge_angle.assign(n, 0.0);
    body.edge_dir.assign(n, Vec2{});
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = body.vertex(static_cast<std::ptrdiff_t>(i) + 1) - body.vertices[i];
        const double len = norm(e);
        body.cum_len[i + 1] = body.cum_len[i] + len;
        body.edge_dir[i] = e / len;
    }
    body.L = body.cum_len[n];
    body.edge_angle[0] = angle_of(body.edge_dir[0]);  // in [0, pi) by the choice of vertex 0
    for (std::size_t i = 1; i < n; ++i) {
        const Vec2& a = body.edge_dir[i - 1];
        const Vec2& b = body.edge_dir[i];
        double t = std::atan2(cross(a, b), dot(a, b));
        if (body.kind == BodyKind::segment) t = pi;
        body.edge_angle[i] = body.edge_angle[i - 1] + t;
    }
    return body;
}

Vec2 point_at(const ConvexBody& body, double t) {
    if (body.kind == BodyKind::point) return body.vertices.front();
    const double tm = wrap_len(t, body.L);
    const auto it = std::upper_bound(body.cum_len.begin(), body.cum_len.end(), tm);
    std::size_t k = static_cast<std::size_t>(it - body.cum_len.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= body.size()) k = body.size() - 1;
    return body.vertices[k] + body.edge_dir[k] * (tm - body.cum_len[k]);
}

AngleInterval vertex_turning(const ConvexBody& body, std::size_t i) {
    require_extent(body, "vertex_turning");
    if (i == 0) return {body.edge_angle.back() - two_pi, body.theta0()};
    return {body.edge_angle[i - 1], body.edge_angle[i]};
}

AngleInterval turning_angle(const ConvexBody& body, double t) {
    require_extent(body, "turning_angle");
    const std::size_t n = body.size();
    const double tm = wrap_len(t, body.L);
    const auto it = std::upper_bound(body.cum_len.begin(), body.cum_len.end(), tm);
    std::size_t k = static_cast<std::size_t>(it - body.cum_len.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= n) k = n - 1;
    if (tm - body.cum_len[k] <= body.eps) return vertex_turning(body, k);
    if (body.cum_len[k + 1] - tm <= body.eps) return vertex_turning(body, (k + 1) % n);
    return {body.edge_angle[k], body.edge_angle[k]};
}

ParamInterval param_of_angle(const ConvexBody& body, double theta) {
    require_extent(body, "param_of_angle");
    const std::size_t n = body.size();
    const double last = body.edge_angle[n - 1];
    // Reduce into (last - 2pi, last].
    double th = wrap_from(theta, last - two_pi);
    if (th - (last - two_pi) <= angle_snap) th = last;
    if (std::fabs(th - last) <= angle_snap) return {body.cum_len[n - 1], body.L};
    if (th < body.theta0() - angle_snap) return {0.0, 0.0};
    const auto it = std::lower_bound(body.edge_angle.begin(), body.edge_angle.end(), th - angle_snap);
    const std::size_t k = static_cast<std::size_t>(it - body.edge_angle.begin());
    if (k < n && std::fabs(body.edge_angle[k] - th) <= angle_snap) return {body.cum_len[k], body.cum_len[k + 1]};
    // Strictly between edge k-1 and edge k: corner at vertex k.
    const double t = body.cum_len[std::min(k, n)];
    return {t, t};
}

Containment contains(const ConvexBody& body, const Vec2& p) {
    if (body.kind != BodyKind::polygon)
        return distance_to_boundary(body, p) <= body.eps ? Containment::boundary : Containment::outside;
    double smin = 1e300;
    for (std::size_t i = 0; i < body.size(); ++i)
        smin = std::min(smin, cross(body.edge_dir[i], p - body.vertices[i]));
    if (smin > body.eps) return Containment::inside;
    if (smin > 0.0) return Containment::boundary;
    return distance_to_boundary(body, p) <= body.eps ? Containment::boundary : Containment::outside;
}

double distance_to_boundary(const ConvexBody& body, const Vec2& p) {
    if (body.kind == BodyKind::point) return dist(p, body.vertices.front());
    double d = 1e300;
    for (std::size_t i = 0; i < body.size(); ++i)
        d = std::min(d, point_segment_distance(p, body.vertices[i], body.vertex(static_cast<std::ptrdiff_t>(i) + 1)));
    return d;
}

double distance_to_body(const ConvexBody& body, const Vec2& p) {
    if (body.kind == BodyKind::polygon) {
        bool inside = true;
        for (std::size_t i = 0; i < body.size() && inside; ++i)
            inside = cross(body.edge_dir[i], p - body.vertices[i]) >= 0.0;
        if (inside) return 0.0;
    }
    return distance_to_boundary(body, p);
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double o1 = cross(b - a, c - a), o2 = cross(b - a, d - a);
    const double o3 = cross(d - c, a - c), o4 = cross(d - c, b - c);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool segment_crosses_body(const ConvexBody& body, const Vec2& a, const Vec2& b) {
    switch (body.kind) {
        case BodyKind::point: return point_segment_distance(body.vertices.front(), a, b) <= body.eps;
        case BodyKind::segment:
            return segment_segment_distance(a, b, body.vertices[0], body.vertices[1]) <= body.eps;
        case BodyKind::polygon: break;
    }
    if (contains(body, a) != Containment::outside || contains(body, b) != Containment::outside) return true;
    for (std::size_t i = 0; i < body.size(); ++i)
        if (segment_segment_distance(a, b, body.vertices[i], body.vertex(static_cast<std::ptrdiff_t>(i) + 1)) <=
            body.eps)
            return true;
    return false;
}

double line_depth(const ConvexBody& body, const Vec2& q, const Vec2& d) {
    const Vec2 dn = normalized(d);
    double hi = -1e300, lo = 1e300;
    for (const auto& v : body.vertices) {
        const double s = cross(dn, v - q);
        hi = std::max(hi, s);
        lo = std::min(lo, s);
    }
    return std::min(hi, -lo);
}

double arc_ccw(const ConvexBody& body, double t1, double t2) { return wrap_len(t2 - t1, body.L); }

TangentFrame supporting_rays(const ConvexBody& body, const Vec2& p) {
    TangentFrame f;
    f.p = p;
    if (body.kind == BodyKind::point) {
        const Vec2& v = body.vertices.front();
        if (dist(p, v) <= body.eps) {
            f.T_minus = f.T_plus = v;
            f.degenerate = true;
            return f;
        }
        f.T_minus = f.T_plus = v;
        f.theta_plus = wrap_from(angle_of(p - v), 0.0);
        f.theta_minus = wrap_from(f.theta_plus + pi, 0.0);
        f.u_plus = dist(p, v);
        f.u_minus = -f.u_plus;
        return f;
    }

    const std::size_t n = body.size();
    const auto cn = static_cast<std::ptrdiff_t>(n);
    if (contains(body, p) != Containment::outside) {
        if (contains(body, p) == Containment::inside)
            throw std::domain_error("supporting_rays: point lies inside the body");
        // Boundary point: both tangent points collapse onto p.
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = point_segment_distance(p, body.vertices[i], body.vertex(static_cast<std::ptrdiff_t>(i) + 1));
            if (d < bd) { bd = d; best = i; }
        }
        const double s = std::clamp(dot(p - body.vertices[best], body.edge_dir[best]), 0.0,
                                    body.cum_len[best + 1] - body.cum_len[best]);
        const double t = body.cum_len[best] + s;
        f.T_minus = f.T_plus = p;
        f.t_minus = f.t_plus = {t, t};
        f.u_minus = f.u_plus = t;
        f.theta_minus = f.theta_plus = body.edge_angle[best];
        f.i_minus = f.i_plus = best;
        f.degenerate = true;
        return f;
    }

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = cross(body.edge_dir[i], p - body.vertices[i]);
    auto sv = [&](std::ptrdiff_t i) { return s[static_cast<std::size_t>(((i % cn) + cn) % cn)]; };

    std::ptrdiff_t ip = -1, im = -1;
    for (std::ptrdiff_t i = 0; i < cn; ++i) {
        if (sv(i) < 0.0 && !(sv(i - 1) < 0.0)) ip = i;
        if (sv(i - 1) < 0.0 && !(sv(i) < 0.0)) im = i;
    }
    if (ip < 0 || im < 0) {
        // Only a segment body on its own line: p lies on an edge extension.
        const Vec2 a = body.vertices[0];
        const bool beyond_b = dot(p - a, body.edge_dir[0]) > 0.0;
        ip = beyond_b ? 0 : 1;  // start vertex of the edge pointing towards p
        im = beyond_b ? 1 : 0;
    } else {
        // Edge tangency: choose the start vertex of the tangent edge.
        if (std::fabs(sv(ip - 1)) <= body.eps && dot(p - body.vertex(ip), body.edge_dir[static_cast<std::size_t>((ip - 1 + cn) % cn)]) > 0.0)
            ip = (ip - 1 + cn) % cn;
        const std::ptrdiff_t jl = (im - 1 + cn) % cn;
        if (std::fabs(sv(jl)) <= body.eps && dot(p - body.vertex(jl), body.edge_dir[static_cast<std::size_t>(jl)]) < 0.0)
            im = jl;
    }

    f.i_plus = static_cast<std::size_t>(ip % cn);
    f.i_minus = static_cast<std::size_t>(im % cn);
    f.T_plus = body.vertices[f.i_plus];
    f.T_minus = body.vertices[f.i_minus];
    const double th0 = body.theta0();
    f.theta_plus = wrap_from(angle_of(p - f.T_plus), th0);
    f.theta_minus = wrap_from(angle_of(f.T_minus - p), th0);
    f.t_plus = param_of_angle(body, f.theta_plus);
    f.t_minus = param_of_angle(body, f.theta_minus);
    f.u_plus = body.cum_len[f.i_plus] + dist(p, f.T_plus);
    f.u_minus = body.cum_len[f.i_minus] - dist(p, f.T_minus);
    return f;
}

}  // namespace strbill
