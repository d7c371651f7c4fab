#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "strbill/string_construction.hpp"
#include "test_support.hpp"

using namespace strbill;
using namespace testing_support;

namespace {

// Distance from p to the nearest edge-extension ray of the polygon.
double ray_clearance(const ConvexBody& b, const Vec2& p) {
    double best = 1e300;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const Vec2 v0 = b.vertices[i];
        const Vec2 v1 = b.vertex(static_cast<std::ptrdiff_t>(i) + 1);
        const Vec2 d = b.edge_dir[i];
        for (const auto& [o, dir] : {std::pair{v1, d}, std::pair{v0, -d}}) {
            const double s = std::max(0.0, dot(p - o, dir));
            best = std::min(best, dist(p, o + dir * s));
        }
    }
    return best;
}

double menger(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 2.0 * std::fabs(cross(b - a, c - a)) / (dist(a, b) * dist(b, c) * dist(a, c));
}

}  // namespace

TEST_CASE("rope_point examples") {
    CHECK(dist(rope_point(origin_point(), 1.0, pi / 2), Vec2{0, 1}) < 1e-15);
    CHECK(dist(rope_point(unit_square(), 2.5, 0.0), Vec2{2.5, 0}) < 1e-15);
    CHECK(dist(rope_point(unit_square(), -0.5, 0.0), Vec2{-0.5, 0}) < 1e-15);
}

TEST_CASE("rope_point is independent of the choice of t") {
    const auto sq = unit_square();
    for (double t : {1.0, 1.25, 1.5, 2.0}) {
        const double u = 3.0;
        const Vec2 p = point_at(sq, t) + unit(pi / 2) * (u - t);
        CHECK(dist(p, rope_point(sq, u, pi / 2)) < 1e-14);
    }
}

TEST_CASE("h_differential examples") {
    const auto sq = unit_square();
    auto h = h_differential(sq, 2.0, pi / 4);
    CHECK(h.single());
    const double r = std::sqrt(2.0) / 2;
    CHECK(h.M_lo.a11 == doctest::Approx(r));
    CHECK(h.M_lo.a21 == doctest::Approx(r));
    CHECK(h.M_lo.a12 == doctest::Approx(-r));
    CHECK(h.M_lo.a22 == doctest::Approx(r));
    h = h_differential(sq, 3.0, 0.0);
    CHECK_FALSE(h.single());
    CHECK(h.M_lo.det() == doctest::Approx(3.0));
    CHECK(h.M_hi.det() == doctest::Approx(2.0));
    CHECK_THROWS_AS(h_differential(sq, 0.5, 0.0), std::domain_error);
}

TEST_CASE("h_differential matches finite differences of rope_point") {
    Rng rng(21);
    for (const auto& b : {unit_square(), segment2(), regular_ngon(7)}) {
        for (int k = 0; k < 200; ++k) {
            double theta = rng.uniform(0.0, two_pi);
            const auto tt = param_of_angle(b, theta);
            if (!tt.singleton()) continue;
            // stay clear of edge directions so the step does not change t(theta)
            bool near_edge = false;
            for (double ea : b.edge_angle) near_edge |= angle_gap(ea, theta) < 1e-4;
            if (near_edge) continue;
            double u = rng.uniform(-3.0, 8.0);
            if (std::fabs(u - tt.lo) < 0.1) u += 0.5;
            const auto h = h_differential(b, u, theta);
            const double e = 1e-6;
            const Vec2 du = (rope_point(b, u + e, theta) - rope_point(b, u - e, theta)) / (2 * e);
            const Vec2 dth = (rope_point(b, u, theta + e) - rope_point(b, u, theta - e)) / (2 * e);
            CHECK(dist(du, h.M_lo.col0()) < 1e-5);
            CHECK(dist(dth, h.M_lo.col1()) < 1e-5);
        }
    }
}

TEST_CASE("potential examples") {
    CHECK(potential(origin_point(), {3, 4}).phi == doctest::Approx(10.0));
    CHECK(potential(segment2(), {0, std::sqrt(3.0)}).phi == doctest::Approx(6.0));
    const auto ev = potential(unit_square(), {1 + std::sqrt(3.0) / 2, 0.5});
    CHECK(ev.phi == doctest::Approx(5.0));
    CHECK(ev.grad.x == doctest::Approx(std::sqrt(3.0)));
    CHECK(ev.grad.y == doctest::Approx(0.0).epsilon(1e-12));
    const auto on = potential(unit_square(), {1, 0.5});
    CHECK(on.frame.degenerate);
    CHECK(on.phi == doctest::Approx(4.0));
    CHECK_THROWS_AS(potential(unit_square(), {0.5, 0.5}), std::domain_error);
}

TEST_CASE("potential invariants on random exterior points") {
    Rng rng(22);
    for (int k = 0; k < 10000; ++k) {
        const auto b = k % 5 == 0 ? segment2() : (k % 5 == 1 ? unit_square() : random_polygon(rng));
        const Vec2 p = random_exterior(rng, b);
        const auto ev = potential(b, p);
        CHECK(ev.phi >= b.L);
        // Upper bound: phi <= 2 dist(p, H) + L
        CHECK(ev.phi <= 2.0 * distance_to_body(b, p) + b.L + 1e-9);
        const double gn = norm(ev.grad);
        CHECK(gn == doctest::Approx(2.0 * std::fabs(std::sin(0.5 * (ev.frame.theta_plus - ev.frame.theta_minus)))));
        CHECK(gn > 0.0);
        CHECK(gn <= 2.0 + 1e-12);
        // bisector: equal angles with e(theta+) and -e(theta-)
        const Vec2 g = ev.grad / gn;
        const double a1 = std::acos(std::clamp(dot(g, unit(ev.frame.theta_plus)), -1.0, 1.0));
        const double a2 = std::acos(std::clamp(dot(g, -unit(ev.frame.theta_minus)), -1.0, 1.0));
        CHECK(std::fabs(a1 - a2) < 1e-9);
    }
}

TEST_CASE("gradient matches central finite differences away from transition rays") {
    Rng rng(23);
    int tested = 0;
    for (int k = 0; k < 4000; ++k) {
        const auto b = k % 3 == 0 ? segment2() : (k % 3 == 1 ? unit_square() : random_polygon(rng));
        const Vec2 p = random_exterior(rng, b);
        if (ray_clearance(b, p) < 1e-3 || distance_to_body(b, p) < 1e-3) continue;
        const double e = 1e-6;
        const auto ev = potential(b, p);
        const Vec2 fd{(potential(b, p + Vec2{e, 0}).phi - potential(b, p - Vec2{e, 0}).phi) / (2 * e),
                      (potential(b, p + Vec2{0, e}).phi - potential(b, p - Vec2{0, e}).phi) / (2 * e)};
        CHECK(dist(fd, ev.grad) < 1e-5);
        ++tested;
    }
    CHECK(tested > 1000);
}

TEST_CASE("level_curve of a point is a circle") {
    for (double lam : {0.1, 1.0, 10.0}) {
        const auto t = level_curve(origin_point(), lam);
        REQUIRE(t.arcs.size() == 1);
        CHECK(t.arcs[0].span() == doctest::Approx(two_pi));
        for (const auto& p : sample_arc(t.arcs[0], 64)) CHECK(std::fabs(norm(p) - lam) < 1e-12 * (1 + lam));
        CHECK(t.total_len == doctest::Approx(two_pi * lam));
    }
    CHECK_THROWS_AS(level_curve(origin_point(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(level_curve(unit_square(), -1.0), std::invalid_argument);
}

TEST_CASE("level_curve of a segment is the gardener's ellipse") {
    const auto t = level_curve(segment2(), 1.0);
    CHECK(t.arcs.size() == 2);
    for (const auto& a : t.arcs) {
        CHECK(a.two_a == doctest::Approx(4.0));
        for (const auto& p : sample_arc(a, 256))
            CHECK(std::fabs(dist(p, {-1, 0}) + dist(p, {1, 0}) - 4.0) < 1e-12);
    }
    CHECK(dist(t.arcs[0].start(), Vec2{2, 0}) < 1e-12);
    CHECK(dist(t.arcs[0].end(), Vec2{-2, 0}) < 1e-12);
}

TEST_CASE("level_curve of the unit square alternates adjacent and diagonal foci") {
    const auto t = level_curve(unit_square(), 0.5);
    REQUIRE(t.arcs.size() == 8);
    int adjacent = 0, diagonal = 0;
    for (std::size_t k = 0; k < 8; ++k) {
        const double fd = dist(t.arcs[k].f1, t.arcs[k].f2);
        const bool adj = std::fabs(fd - 1.0) < 1e-12;
        const bool diag = std::fabs(fd - std::sqrt(2.0)) < 1e-12;
        CHECK((adj || diag));
        adjacent += adj;
        diagonal += diag;
        if (k > 0) CHECK(adj != (std::fabs(dist(t.arcs[k - 1].f1, t.arcs[k - 1].f2) - 1.0) < 1e-12));
        CHECK(t.arcs[k].two_a == doctest::Approx(adj ? 2.0 : 3.0));
    }
    CHECK(adjacent == 4);
    CHECK(diagonal == 4);
}

TEST_CASE("table invariants on random polygons") {
    Rng rng(24);
    for (int trial = 0; trial < 40; ++trial) {
        const auto b = trial == 0 ? unit_square() : (trial == 1 ? segment2() : random_polygon(rng));
        const double lam = rng.uniform(0.05, 2.0);
        const auto t = level_curve(b, lam);
        const std::size_t na = t.arcs.size();
        double turning = 0.0;
        for (std::size_t k = 0; k < na; ++k) {
            const auto& a = t.arcs[k];
            CHECK(a.two_a > dist(a.f1, a.f2));
            // foci are vertices of the body
            auto is_vertex = [&](const Vec2& f) {
                return std::any_of(b.vertices.begin(), b.vertices.end(), [&](const Vec2& v) { return v == f; });
            };
            CHECK(is_vertex(a.f1));
            CHECK(is_vertex(a.f2));
            for (const auto& p : sample_arc(a, 8)) {
                CHECK(std::fabs(dist(p, a.f1) + dist(p, a.f2) - a.two_a) < b.eps);
                CHECK(std::fabs(potential(b, p).phi - t.level()) < 1e-9 * t.level());
            }
            const auto& nx = t.arcs[(k + 1) % na];
            CHECK(dist(a.end(), nx.start()) < 1e-12 * (1 + b.diameter));
            const double mismatch = std::fabs(std::remainder(angle_of(a.tangent(a.s1)) - angle_of(nx.tangent(nx.s0)), two_pi));
            CHECK(mismatch < 1e-9);
            turning += a.span() > 0 ? std::remainder(angle_of(a.tangent(a.s1)) - angle_of(a.tangent(a.s0)), two_pi) : 0;
            // large arcs can exceed pi of turning; count them by pieces
        }
        double total = 0.0;
        for (const auto& a : t.arcs) {
            double prev = angle_of(a.tangent(a.s0));
            for (int q = 1; q <= 32; ++q) {
                const double cur = angle_of(a.tangent(a.s0 + a.span() * q / 32));
                const double d = std::remainder(cur - prev, two_pi);
                CHECK(d > 0.0);
                total += d;
                prev = cur;
            }
        }
        CHECK(total == doctest::Approx(two_pi).epsilon(1e-9));
        CHECK(min_distance(t) >= lam - b.eps);
    }
}

TEST_CASE("boundary_eval spot values") {
    const auto seg = level_curve(segment2(), 1.0);
    auto bp = boundary_eval(seg, locate(seg, {2, 0}));
    CHECK(dist(bp.point, Vec2{2, 0}) < 1e-12);
    CHECK(std::fabs(bp.curvature - 2.0 / 3.0) < 1e-9);
    CHECK(std::fabs(bp.curvature_before - 2.0 / 3.0) < 1e-9);
    CHECK(dist(bp.normal, Vec2{-1, 0}) < 1e-9);

    const auto sq = level_curve(unit_square(), 0.5);
    const Vec2 cv{1 + std::sqrt(3.0) / 2, 0.5};
    bp = boundary_eval(sq, locate(sq, cv));
    CHECK(dist(bp.point, cv) < 1e-9);
    CHECK(std::fabs(bp.curvature - std::sqrt(3.0) / 2) < 1e-9);
    CHECK(dist(bp.normal, Vec2{-1, 0}) < 1e-9);
    // standard co-vertex curvature b/a^2 with a = 1, b = sqrt(3)/2
    CHECK(bp.curvature == doctest::Approx(std::sqrt(3.0) / 2 / 1.0));

    const auto circ = level_curve(origin_point(), 2.0);
    for (double tau : {0.0, 1.0, 5.0, 12.0}) CHECK(boundary_eval(circ, tau).curvature == doctest::Approx(0.5));
}

TEST_CASE("focal curvature matches Menger curvature away from junctions") {
    Rng rng(25);
    for (int trial = 0; trial < 30; ++trial) {
        const auto b = trial == 0 ? unit_square() : random_polygon(rng);
        const auto t = level_curve(b, rng.uniform(0.1, 1.5));
        for (std::size_t k = 0; k < t.arcs.size(); ++k) {
            const double len = t.offsets[k + 1] - t.offsets[k];
            if (len < 1e-3) continue;
            const double tau = t.offsets[k] + 0.5 * len;
            const double h = std::min(1e-3, 0.25 * len);
            const auto m = boundary_eval(t, tau);
            const double km = menger(boundary_eval(t, tau - h).point, m.point, boundary_eval(t, tau + h).point);
            CHECK(std::fabs(km - m.curvature) < 1e-4 * m.curvature);
            // standard ellipse curvature ab / (a^2 sin^2 + b^2 cos^2)^(3/2)
            const auto& a = t.arcs[k];
            const double A = a.semi_major(), B = a.semi_minor();
            const double den = std::pow(A * A * std::sin(m.s) * std::sin(m.s) + B * B * std::cos(m.s) * std::cos(m.s), 1.5);
            CHECK(m.curvature == doctest::Approx(A * B / den).epsilon(1e-9));
        }
    }
}

TEST_CASE("min_distance examples") {
    CHECK(min_distance(level_curve(origin_point(), 1.0)) == doctest::Approx(1.0));
    CHECK(std::fabs(min_distance(level_curve(segment2(), 1.0)) - 1.0) < 1e-9);
    const double lam = std::sqrt(3.0) - std::acos(0.5);
    const auto disk = level_curve(regular_ngon(1024), lam);
    const double md = min_distance(disk);
    CHECK(md > lam);
    CHECK(md == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("disk oracle: 1024-gon table is a circle of radius 2") {
    // Smooth disk: tangent length sqrt(R^2-1) on each side, far arc 2pi - 2 arccos(1/R).
    auto lam_of_R = [](double R) { return std::sqrt(R * R - 1) - std::acos(1 / R); };
    CHECK(lam_of_R(2.0) == doctest::Approx(std::sqrt(3.0) - pi / 3));
    const auto t = level_curve(regular_ngon(1024), lam_of_R(2.0));
    CHECK(t.arcs.size() == 2048);
    double worst = 0.0;
    for (const auto& a : t.arcs)
        for (const auto& p : sample_arc(a, 4)) worst = std::max(worst, std::fabs(norm(p) - 2.0));
    CHECK(worst < 1e-4);
}

TEST_CASE("rope_point is Lipschitz in theta") {
    Rng rng(26);
    for (const auto& b : {unit_square(), segment2(), regular_ngon(9), origin_point()}) {
        for (int k = 0; k < 500; ++k) {
            const double u = rng.uniform(-5, 10);
            const double t1 = rng.uniform(0, two_pi);
            const double t2 = t1 + rng.uniform(-0.01, 0.01);
            const double q = dist(rope_point(b, u, t1), rope_point(b, u, t2)) / std::fabs(t2 - t1);
            CHECK(q <= std::fabs(u) + b.L + b.diameter);
        }
    }
}

TEST_CASE("inverse-map gradients match (cos theta, sin theta)") {
    Rng rng(27);
    int tested = 0;
    for (int k = 0; k < 2000; ++k) {
        const auto b = k % 2 ? unit_square() : regular_ngon(5);
        const Vec2 p = random_exterior(rng, b);
        if (ray_clearance(b, p) < 1e-3) continue;
        const double e = 1e-6;
        const auto f = supporting_rays(b, p);
        auto up = [&](const Vec2& q) { return supporting_rays(b, q).u_plus; };
        auto um = [&](const Vec2& q) { return supporting_rays(b, q).u_minus; };
        const Vec2 gp{(up(p + Vec2{e, 0}) - up(p - Vec2{e, 0})) / (2 * e), (up(p + Vec2{0, e}) - up(p - Vec2{0, e})) / (2 * e)};
        const Vec2 gm{(um(p + Vec2{e, 0}) - um(p - Vec2{e, 0})) / (2 * e), (um(p + Vec2{0, e}) - um(p - Vec2{0, e})) / (2 * e)};
        CHECK(dist(gp, unit(f.theta_plus)) < 1e-5);
        CHECK(dist(gm, unit(f.theta_minus)) < 1e-5);
        CHECK(dist(rope_point(b, f.u_plus, f.theta_plus), p) < b.eps);
        CHECK(dist(rope_point(b, f.u_minus, f.theta_minus), p) < b.eps);
        ++tested;
    }
    CHECK(tested > 500);
}
