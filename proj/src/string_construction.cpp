#include "strbill/string_construction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace strbill {

namespace {

// Events whose canonical angles differ by less than this are simultaneous.
constexpr double tie_tol = 1e-12;

// 10-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 5> gl_x = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                        0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> gl_w = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                        0.1494513491505806, 0.0666713443086881};

double floor_div(std::ptrdiff_t k, std::ptrdiff_t n) {
    return static_cast<double>(k >= 0 ? k / n : -((-k + n - 1) / n));
}

// Unwrapped arc-length parameter of vertex k.
double U(const ConvexBody& body, std::ptrdiff_t k) {
    const auto n = static_cast<std::ptrdiff_t>(body.size());
    const double w = floor_div(k, n);
    const auto r = static_cast<std::size_t>(k - static_cast<std::ptrdiff_t>(w) * n);
    return body.cum_len[r] + body.L * w;
}

const Vec2& edge_direction(const ConvexBody& body, std::ptrdiff_t k) {
    const auto n = static_cast<std::ptrdiff_t>(body.size());
    return body.edge_dir[static_cast<std::size_t>(((k % n) + n) % n)];
}

// Distance along d from focus f to the ellipse with the other focus g.
double ray_from_focus(const Vec2& f, const Vec2& g, double two_a, const Vec2& d) {
    const Vec2 w = f - g;
    return (two_a * two_a - norm2(w)) / (2.0 * (two_a + dot(w, d)));
}

double raw_param(const EllipticArc& e, const Vec2& p) {
    const Vec2 u = e.axis();
    const Vec2 r = p - e.center();
    return std::atan2(dot(r, perp(u)) / e.semi_minor(), dot(r, u) / e.semi_major());
}

double ccw_increment(double from, double to) {
    double inc = wrap_from(to - from, 0.0);
    if (inc > two_pi - tie_tol) inc = 0.0;
    return inc;
}

struct SweepSpec {
    std::ptrdiff_t i{0};
    std::ptrdiff_t j{0};
    Vec2 start;
    std::ptrdiff_t i_stop{0};  // closed sweep stops when T_plus reaches this index
    std::ptrdiff_t j_max{0};   // T_minus never advances past this index
    bool closed{true};
    Vec2 end_point;            // open sweep ends here once i == j == j_max
};

std::vector<SweepArc> run_sweep(const ConvexBody& body, double lam, SweepSpec sp) {
    std::vector<SweepArc> out;
    std::ptrdiff_t i = sp.i, j = sp.j;
    Vec2 p = sp.start;
    const std::size_t guard = 4 * body.size() + 16;
    for (std::size_t iter = 0; iter < guard; ++iter) {
        const Vec2 f1 = body.vertex(i), f2 = body.vertex(j);
        EllipticArc cur{f1, f2, 2.0 * lam + U(body, j) - U(body, i), 0.0, 0.0};
        const double s_now = raw_param(cur, p);
        cur.s0 = s_now;

        const bool at_end = !sp.closed && i == sp.j_max && j == sp.j_max;
        double inc_a = 1e300, inc_b = 1e300, inc_end = 1e300;
        Vec2 qa, qb;
        if (at_end) {
            inc_end = ccw_increment(s_now, raw_param(cur, sp.end_point));
        } else {
            if (i < j) {
                const Vec2& d = edge_direction(body, i);
                qa = f1 + d * ray_from_focus(f1, f2, cur.two_a, d);
                inc_a = ccw_increment(s_now, raw_param(cur, qa));
            }
            if (sp.closed || j < sp.j_max) {
                const Vec2 d = -edge_direction(body, j);
                qb = f2 + d * ray_from_focus(f2, f1, cur.two_a, d);
                inc_b = ccw_increment(s_now, raw_param(cur, qb));
            }
        }
        const double inc = std::min({inc_a, inc_b, inc_end});
        if (inc > two_pi) throw std::logic_error("string sweep: no transition event");
        if (inc > tie_tol) {
            cur.s1 = s_now + inc;
            out.push_back({cur, i, j});
        }
        if (at_end) return out;
        const bool adv_a = inc_a - inc <= tie_tol;
        const bool adv_b = inc_b - inc <= tie_tol;
        p = adv_a ? qa : qb;
        if (adv_a) ++i;
        if (adv_b) ++j;
        if (sp.closed && i >= sp.i_stop) {
            if (i != sp.i_stop || j != sp.j + static_cast<std::ptrdiff_t>(body.size()))
                throw std::logic_error("string sweep: inconsistent closing state");
            return out;
        }
    }
    throw std::logic_error("string sweep did not terminate");
}

double speed(const EllipticArc& e, double s) {
    const double a = e.semi_major(), b = e.semi_minor();
    return std::hypot(a * std::sin(s), b * std::cos(s));
}

}  // namespace

Vec2 rope_point(const ConvexBody& body, double u, double theta) {
    if (body.kind == BodyKind::point) return body.vertices.front() + unit(theta) * u;
    const double t = param_of_angle(body, theta).lo;
    return point_at(body, t) + unit(theta) * (u - t);
}

HDifferential h_differential(const ConvexBody& body, double u, double theta) {
    ParamInterval tt{0.0, 0.0};
    if (body.kind != BodyKind::point) tt = param_of_angle(body, theta);
    if (u >= tt.lo && u <= tt.hi) throw std::domain_error("h_differential: u lies in t(theta)");
    const double c = std::cos(theta), s = std::sin(theta);
    auto make = [&](double t) {
        const double r = u - t;
        return Mat2{c, -r * s, s, r * c};
    };
    return {make(tt.lo), make(tt.hi)};
}

PotentialEval potential(const ConvexBody& body, const Vec2& p) {
    PotentialEval ev;
    ev.frame = supporting_rays(body, p);
    const TangentFrame& f = ev.frame;
    if (f.degenerate) {
        ev.phi = body.L;
        return ev;
    }
    const double far = body.L - (body.kind == BodyKind::point
                                     ? 0.0
                                     : arc_ccw(body, body.cum_len[f.i_plus], body.cum_len[f.i_minus]));
    ev.phi = dist(p, f.T_plus) + dist(p, f.T_minus) + far;
    ev.grad = unit(f.theta_plus) - unit(f.theta_minus);
    return ev;
}

double focal_curvature(const Vec2& p, const Vec2& f1, const Vec2& f2) {
    const double dp = dist(p, f1), dm = dist(p, f2);
    const double th_p = angle_of(p - f1);
    const double th_m = f1 == f2 ? th_p + pi : angle_of(f2 - p);
    return (dp + dm) / (2.0 * dp * dm) * std::fabs(std::sin(0.5 * (th_p - th_m)));
}

Vec2 focal_gradient(const Vec2& p, const Vec2& f1, const Vec2& f2) {
    return normalized(p - f1) + normalized(p - f2);
}

double arc_length(const EllipticArc& arc, double s_from, double s_to) {
    const double span = s_to - s_from;
    if (span == 0.0) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(std::fabs(span) / (pi / 32.0))));
    const double h = span / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double mid = s_from + (k + 0.5) * h;
        double acc = 0.0;
        for (std::size_t q = 0; q < gl_x.size(); ++q)
            acc += gl_w[q] * (speed(arc, mid + 0.5 * h * gl_x[q]) + speed(arc, mid - 0.5 * h * gl_x[q]));
        total += 0.5 * h * acc;
    }
    return total;
}

std::vector<SweepArc> essential_sweep(const ConvexBody& body, double lam, std::size_t b, std::size_t m,
                                      double theta_a, double theta_b) {
    if (!(lam > 0.0)) throw std::invalid_argument("essential_sweep: lambda must be positive");
    if (body.kind == BodyKind::point || m == 0) throw std::invalid_argument("essential_sweep: empty essential arc");
    const auto ib = static_cast<std::ptrdiff_t>(b);
    SweepSpec sp;
    sp.closed = false;
    sp.i = sp.j = ib;
    sp.j_max = ib + static_cast<std::ptrdiff_t>(m);
    sp.start = body.vertex(ib) - unit(theta_b) * lam;
    sp.end_point = body.vertex(sp.j_max) + unit(theta_a) * lam;
    return run_sweep(body, lam, sp);
}

TableBoundary level_curve(const ConvexBody& body, double lam) {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw std::invalid_argument("level_curve: lambda must be positive");
    TableBoundary table;
    table.lam = lam;
    table.body = body;
    if (body.kind == BodyKind::point) {
        const Vec2 c = body.vertices.front();
        table.arcs.push_back({c, c, 2.0 * lam, -0.5 * pi, 1.5 * pi});
    } else {
        const std::size_t n = body.size();
        // Start on the forward extension of edge 0, just after T_plus moved to vertex 1.
        const Vec2 f1 = body.vertex(1);
        const Vec2& d = body.edge_dir[0];
        double best = 1e300;
        std::ptrdiff_t jbest = 2;
        Vec2 qbest;
        for (std::size_t jj = 0; jj < n; ++jj) {
            if (jj == 1) continue;
            const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(jj) <= 1 ? static_cast<std::ptrdiff_t>(jj + n)
                                                                          : static_cast<std::ptrdiff_t>(jj);
            const double two_a = 2.0 * lam + U(body, j) - U(body, 1);
            const Vec2 f2 = body.vertex(j);
            const double r = ray_from_focus(f1, f2, two_a, d);
            if (!(r > 0.0)) continue;
            const Vec2 q = f1 + d * r;
            const AngleInterval iv = vertex_turning(body, jj);
            const double mid = 0.5 * (iv.lo + iv.hi);
            const double th = wrap_from(angle_of(f2 - q), mid - pi);
            const double viol = std::max({0.0, iv.lo - th, th - iv.hi});
            if (viol < best) {
                best = viol;
                jbest = j;
                qbest = q;
            }
        }
        SweepSpec sp;
        sp.closed = true;
        sp.i = 1;
        sp.j = jbest;
        sp.start = qbest;
        sp.i_stop = 1 + static_cast<std::ptrdiff_t>(n);
        for (auto& a : run_sweep(body, lam, sp)) table.arcs.push_back(a.arc);
    }
    table.offsets.assign(1, 0.0);
    for (const auto& a : table.arcs) table.offsets.push_back(table.offsets.back() + arc_length(a, a.s0, a.s1));
    table.total_len = table.offsets.back();
    return table;
}

BoundaryPoint boundary_eval(const TableBoundary& table, double tau) {
    if (table.arcs.empty()) throw std::invalid_argument("boundary_eval: empty table");
    double t = std::fmod(tau, table.total_len);
    if (t < 0.0) t += table.total_len;
    const auto it = std::upper_bound(table.offsets.begin(), table.offsets.end(), t);
    std::size_t k = static_cast<std::size_t>(it - table.offsets.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= table.arcs.size()) k = table.arcs.size() - 1;
    const EllipticArc& arc = table.arcs[k];
    const double local = t - table.offsets[k];
    const double len = table.offsets[k + 1] - table.offsets[k];

    // Invert arc length by safeguarded Newton.
    double lo = arc.s0, hi = arc.s1;
    double s = arc.s0 + arc.span() * (len > 0.0 ? local / len : 0.0);
    for (int iter = 0; iter < 60; ++iter) {
        const double f = arc_length(arc, arc.s0, s) - local;
        if (std::fabs(f) < 1e-15 * (1.0 + table.total_len)) break;
        if (f > 0.0) hi = s; else lo = s;
        double next = s - f / speed(arc, s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
    }

    BoundaryPoint bp;
    bp.arc = k;
    bp.s = s;
    bp.point = arc.point(s);
    bp.normal = -normalized(focal_gradient(bp.point, arc.f1, arc.f2));
    bp.curvature = focal_curvature(bp.point, arc.f1, arc.f2);
    bp.curvature_before = bp.curvature;
    const double jtol = 1e-12 * (1.0 + table.total_len);
    if (local <= jtol || len - local <= jtol) {
        bp.at_junction = true;
        const std::size_t nb = table.arcs.size();
        const EllipticArc& other = local <= jtol ? table.arcs[(k + nb - 1) % nb] : table.arcs[(k + 1) % nb];
        const double kother = focal_curvature(bp.point, other.f1, other.f2);
        if (local <= jtol) bp.curvature_before = kother;
        else { bp.curvature_before = bp.curvature; bp.curvature = kother; }
    }
    return bp;
}

double locate(const TableBoundary& table, const Vec2& p) {
    double best = 1e300, tau = 0.0;
    for (std::size_t k = 0; k < table.arcs.size(); ++k) {
        const EllipticArc& a = table.arcs[k];
        double s = a.param_of(p);
        if (s > a.s1) s = dist(p, a.end()) < dist(p, a.start()) ? a.s1 : a.s0;
        const double d = dist(p, a.point(s));
        if (d < best) {
            best = d;
            tau = table.offsets[k] + arc_length(a, a.s0, s);
        }
    }
    return tau;
}

std::vector<Vec2> sample_arc(const EllipticArc& arc, int k) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(k) + 1);
    for (int q = 0; q <= k; ++q) pts.push_back(arc.point(arc.s0 + arc.span() * q / k));
    return pts;
}

double min_distance(const TableBoundary& table) {
    double best = 1e300;
    for (const auto& a : table.arcs)
        for (const auto& p : sample_arc(a, 16)) best = std::min(best, distance_to_body(table.body, p));
    return best;
}

}  // namespace strbill
