#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "strbill/dynamics.hpp"
#include "strbill/scene.hpp"
#include "test_support.hpp"

using namespace strbill;
using namespace testing_support;

namespace {

bool has_violation(const ValidationReport& r, const std::string& needle) {
    for (const auto& v : r.violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

ConvexBody square02() { return make_body({{0, 0}, {2, 0}, {2, 2}, {0, 2}}); }

Scene segment_livshits(double lam = 1.0) {
    return livshits_obstacle(segment2(), {{-1, 0}, {1, 0}}, {{1, 0}, {1, 0}}, lam);
}

Scene standard_penrose() {
    PenroseCap c1{"H1", make_body({{-1, 3}, {1, 3}}), {{-1, 3}, {1, 0}}, {{1, 3}, {1, 0}}, {}};
    PenroseCap c2{"H2", make_body({{-1, -3}, {1, -3}}), {{1, -3}, {1, 0}}, {{-1, -3}, {1, 0}}, {}};
    return penrose_room(c1, c2, 1.0);
}

// Largest |dot(tangent, line direction)| at the two mouths of the essential curve.
double mouth_misalignment(const HiddenRegion& h) {
    const auto& first = h.essential.front().arc;
    const auto& last = h.essential.back().arc;
    const double at_b = std::fabs(dot(first.tangent(first.s0), unit(h.theta_b)));
    const double at_a = std::fabs(dot(last.tangent(last.s1), unit(h.theta_a)));
    return std::max(at_a, at_b);
}

double max_modified_error(const HiddenRegion& h) {
    const double L_ess = arc_ccw(h.body, h.body.cum_len[h.b], h.body.cum_len[h.a]);
    double worst = 0.0;
    for (const auto& sa : h.essential)
        for (const auto& p : sample_arc(sa.arc, 8))
            worst = std::max(worst, std::fabs(modified_potential(h, p) - (2.0 * h.lam + L_ess)));
    return worst / (L_ess + 2.0 * h.lam);
}

double essential_arc_distance(const HiddenRegion& h, const Vec2& p) {
    double best = 1e300;
    const auto b = static_cast<std::ptrdiff_t>(h.b);
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(h.m); ++k)
        best = std::min(best, point_segment_distance(p, h.body.vertex(b + k), h.body.vertex(b + k + 1)));
    return best;
}

}  // namespace

TEST_CASE("mushroom tables delegate to the level curve") {
    const Scene pt = mushroom_table(origin_point(), 1.0);
    REQUIRE(pt.chains.size() == 1);
    REQUIRE(pt.chains[0].elements.size() == 1);
    const auto& c = std::get<EllipticArc>(pt.chains[0].elements[0].geom);
    CHECK(c.semi_major() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.semi_minor() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pt.kind == SceneKind::closed_table);
    CHECK(validate_scene(pt).ok());

    const Scene seg = mushroom_table(segment2(), 1.0);
    CHECK(validate_scene(seg).ok());
    for (const auto& ce : seg.chains[0].elements) {
        const auto& a = std::get<EllipticArc>(ce.geom);
        CHECK(a.semi_major() == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(a.semi_minor() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    }

    const Scene sq = mushroom_table(unit_square(), 0.5);
    CHECK(sq.chains[0].elements.size() == 8);
    CHECK(validate_scene(sq).ok());
    const TableBoundary t = level_curve(unit_square(), 0.5);
    REQUIRE(t.arcs.size() == sq.chains[0].elements.size());
    for (std::size_t k = 0; k < t.arcs.size(); ++k) CHECK(std::get<EllipticArc>(sq.chains[0].elements[k].geom) == t.arcs[k]);

    CHECK_THROWS_AS(mushroom_table(unit_square(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mushroom_table(unit_square(), -1.0), std::invalid_argument);
}

TEST_CASE("lambda_max examples") {
    const ConvexBody disk = regular_ngon(1024);
    CHECK(std::isinf(lambda_max(disk, {{-1, 0}, {0, 1}}, {{1, 0}, {0, 1}})));
    // Lines y = -x and y = x - 2 meet at P = (1, -1), below the bottom edge.
    CHECK(lambda_max(square02(), {{0, 0}, {1, -1}}, {{2, 0}, {1, 1}}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    // Same lines with the essential arc along the bottom: P is on the side of H.
    CHECK(std::isinf(lambda_max(square02(), {{2, 0}, {1, 1}}, {{0, 0}, {1, -1}})));
    CHECK_THROWS_AS(lambda_max(square02(), {{0.5, 0.5}, {1, 0}}, {{2, 0}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_max(square02(), {{1, 0}, {1, 0}}, {{2, 0}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(lambda_max(square02(), {{0, 0}, {1, 1}}, {{2, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("segment Livshits obstacle is the upper gardener's semi-ellipse") {
    const Scene s = segment_livshits();
    CHECK(s.kind == SceneKind::open_obstacles);
    REQUIRE(s.chains.size() == 2);
    CHECK(s.chains[0].role == ChainRole::cap);
    CHECK(s.chains[1].role == ChainRole::obstacle);
    CHECK(validate_scene(s).ok());
    REQUIRE(s.hidden.size() == 1);
    const HiddenRegion& h = s.hidden[0];
    CHECK(dist(h.A_prime, Vec2{-2, 0}) < 1e-15);
    CHECK(dist(h.B_prime, Vec2{2, 0}) < 1e-15);
    double span = 0.0;
    for (const auto& sa : h.essential) {
        span += sa.arc.span();
        for (const auto& p : sample_arc(sa.arc, 64)) {
            CHECK(dist(p, {-1, 0}) + dist(p, {1, 0}) == doctest::Approx(4.0).epsilon(1e-14));
            CHECK(p.y >= -1e-12);
        }
    }
    CHECK(span == doctest::Approx(pi).epsilon(1e-12));
    CHECK(mouth_misalignment(h) < 1e-9);
    CHECK(max_modified_error(h) < 1e-9);
    // Cap: the default sliver below the segment.
    const double t = 0.02 * 2.0;
    CHECK(in_forbidden(s, {0, -0.5 * t}));
    CHECK_FALSE(in_forbidden(s, {0, -2.0 * t}));
    CHECK_FALSE(in_forbidden(s, {0, 0.5}));
    CHECK_FALSE(in_forbidden(s, {0, 1.7}));
    CHECK(in_forbidden(s, {0, 1.8}));
}

TEST_CASE("disk Livshits obstacle meets the vertical tangents orthogonally") {
    const ConvexBody disk = regular_ngon(1024);
    const Scene s = livshits_obstacle(disk, {{-1, 0}, {0, 1}}, {{1, 0}, {0, 1}}, 0.5);
    CHECK(validate_scene(s).ok());
    const HiddenRegion& h = s.hidden[0];
    CHECK(dist(h.A_prime, Vec2{-1, -0.5}) < 1e-12);
    CHECK(dist(h.B_prime, Vec2{1, -0.5}) < 1e-12);
    CHECK(dist(h.essential.front().arc.start(), h.B_prime) < 1e-12);
    CHECK(dist(h.essential.back().arc.end(), h.A_prime) < 1e-12);
    CHECK(mouth_misalignment(h) < 1e-9);
    CHECK(max_modified_error(h) < 1e-9);
    // Every essential point stays at least lambda from the essential arc of H.
    for (const auto& sa : h.essential)
        for (const auto& p : sample_arc(sa.arc, 4)) CHECK(essential_arc_distance(h, p) >= 0.5 - 1e-9);
    // Hidden set sits in free space; the cap covers the lower rim.
    CHECK_FALSE(in_forbidden(s, {0, 0}));
    CHECK(in_forbidden(s, {0, -1.01}));
}

TEST_CASE("converging mouth lines: construction below lambda_max, rejection at and above") {
    const AnchorLine A{{0, 0}, {1, -1}}, B{{2, 0}, {1, 1}};
    const Scene s = livshits_obstacle(square02(), A, B, 1.0);
    CHECK(validate_scene(s).ok());
    CHECK(mouth_misalignment(s.hidden[0]) < 1e-9);
    CHECK(max_modified_error(s.hidden[0]) < 1e-9);
    CHECK_THROWS_AS(livshits_obstacle(square02(), A, B, std::sqrt(2.0)), std::invalid_argument);
    CHECK_THROWS_AS(livshits_obstacle(square02(), A, B, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(livshits_obstacle(square02(), A, B, 0.0), std::invalid_argument);
}

TEST_CASE("closure and cap paths are checked against the essential region") {
    ClosureSpec bad;
    bad.steps.push_back({PathStep::Kind::line, {0, 1}, {}, true});
    CHECK_THROWS_WITH_AS(livshits_obstacle(segment2(), {{-1, 0}, {1, 0}}, {{1, 0}, {1, 0}}, 1.0, {}, bad),
                         doctest::Contains("closure"), std::invalid_argument);
    ClosureSpec arc_closure;
    arc_closure.steps.push_back({PathStep::Kind::line, {-3, 0}, {}, true});
    arc_closure.steps.push_back({PathStep::Kind::arc, {3, 0}, {0, 0}, false});
    const Scene ok = livshits_obstacle(segment2(), {{-1, 0}, {1, 0}}, {{1, 0}, {1, 0}}, 1.0, {}, arc_closure);
    CHECK(validate_scene(ok).ok());
    ClosureSpec skew;
    skew.steps.push_back({PathStep::Kind::arc, {3, 0.5}, {0, 0}, false});
    CHECK_THROWS_AS(livshits_obstacle(segment2(), {{-1, 0}, {1, 0}}, {{1, 0}, {1, 0}}, 1.0, {}, skew),
                    std::invalid_argument);
    ClosureSpec cap;
    cap.steps.push_back({PathStep::Kind::line, {1, -0.3}, {}, true});
    cap.steps.push_back({PathStep::Kind::line, {-1, -0.3}, {}, true});
    const Scene thick = livshits_obstacle(segment2(), {{-1, 0}, {1, 0}}, {{1, 0}, {1, 0}}, 1.0, cap);
    CHECK(in_forbidden(thick, {0, -0.2}));
    ClosureSpec cap_up;
    cap_up.steps.push_back({PathStep::Kind::line, {0, 0.5}, {}, true});
    CHECK_THROWS_AS(livshits_obstacle(segment2(), {{-1, 0}, {1, 0}}, {{1, 0}, {1, 0}}, 1.0, cap_up),
                    std::invalid_argument);
}

TEST_CASE("random Livshits constructions satisfy the essential-curve invariants") {
    Rng rng(11);
    int built = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const ConvexBody body = random_polygon(rng);
        if (body.kind != BodyKind::polygon) continue;
        const auto n = body.size();
        const std::size_t b = static_cast<std::size_t>(rng.integer(0, static_cast<int>(n) - 1));
        const std::size_t m = static_cast<std::size_t>(rng.integer(1, static_cast<int>(n) - 1));
        const std::size_t a = (b + m) % n;
        const AngleInterval ia = vertex_turning(body, a), ib = vertex_turning(body, b);
        const AnchorLine A{body.vertices[a], unit(ia.lo + rng.uniform(0.2, 0.8) * (ia.hi - ia.lo))};
        const AnchorLine B{body.vertices[b], unit(ib.lo + rng.uniform(0.2, 0.8) * (ib.hi - ib.lo))};
        const double lmax = lambda_max(body, A, B);
        const double lam = std::min(rng.uniform(0.1, 1.0), 0.5 * lmax);
        Scene s;
        try {
            s = livshits_obstacle(body, A, B, lam);
        } catch (const std::invalid_argument& e) {
            // Default closures may legitimately fail for awkward wedges; count them.
            MESSAGE("construction rejected: " << std::string(e.what()));
            continue;
        }
        ++built;
        const HiddenRegion& h = s.hidden[0];
        CHECK(validate_scene(s).ok());
        CHECK(mouth_misalignment(h) < 1e-9);
        CHECK(max_modified_error(h) < 1e-9);
        CHECK(dist(h.essential.front().arc.start(), h.B_prime) < 1e-9 * (1 + body.diameter));
        CHECK(dist(h.essential.back().arc.end(), h.A_prime) < 1e-9 * (1 + body.diameter));
        for (std::size_t k = 1; k < h.essential.size(); ++k) {
            const auto& p = h.essential[k - 1].arc;
            const auto& q = h.essential[k].arc;
            CHECK(dist(p.end(), q.start()) < 1e-9 * (1 + body.diameter));
            CHECK(std::fabs(cross(p.tangent(p.s1), q.tangent(q.s0))) < 1e-9);
        }
    }
    CHECK(built >= 50);
}

TEST_CASE("standard Penrose room") {
    const Scene s = standard_penrose();
    CHECK(s.kind == SceneKind::room);
    REQUIRE(s.chains.size() == 3);
    CHECK(s.chains[0].role == ChainRole::room_wall);
    CHECK(s.chains[1].role == ChainRole::cap);
    CHECK(s.chains[2].role == ChainRole::cap);
    CHECK(validate_scene(s).ok());
    CHECK(chain_area(s.chains[0]) > 0.0);
    REQUIRE(s.hidden.size() == 2);
    CHECK(dist(s.hidden[0].A_prime, Vec2{-2, 3}) < 1e-15);
    CHECK(dist(s.hidden[0].B_prime, Vec2{2, 3}) < 1e-15);
    CHECK(dist(s.hidden[1].A_prime, Vec2{2, -3}) < 1e-15);
    CHECK(dist(s.hidden[1].B_prime, Vec2{-2, -3}) < 1e-15);
    // Two semi-elliptic ends joined by straight walls.
    int arcs = 0, segs = 0;
    for (const auto& ce : s.chains[0].elements) (std::holds_alternative<EllipticArc>(ce.geom) ? arcs : segs)++;
    CHECK(arcs == 2);
    CHECK(segs == 2);
    CHECK_FALSE(in_forbidden(s, {0, 0}));
    CHECK_FALSE(in_forbidden(s, {0, 3.5}));
    CHECK(in_forbidden(s, {0, 2.99}));
    CHECK(in_forbidden(s, {3, 0}));
    CHECK(in_forbidden(s, {0, 4.8}));
}

TEST_CASE("mixed Penrose room and room errors") {
    PenroseCap c1{"seg", make_body({{-1, 3}, {1, 3}}), {{-1, 3}, {1, 0}}, {{1, 3}, {1, 0}}, {}};
    const ConvexBody sq = make_body({{-0.5, -3.5}, {0.5, -3.5}, {0.5, -2.5}, {-0.5, -2.5}});
    PenroseCap c2{"square", sq, {{0.5, -2.5}, {0, 1}}, {{-0.5, -2.5}, {0, 1}}, {}};
    const Scene s = penrose_room(c1, c2, 0.5);
    CHECK(validate_scene(s).ok());
    const auto& ess = s.hidden[1].essential;
    CHECK(ess.size() >= 4);
    CHECK(ess.size() <= 8);

    PenroseCap overlap{"o", make_body({{-1, 3.0}, {1, 3.0}, {0, 4}}), {{-1, 3}, {1, 0}}, {{1, 3}, {1, 0}}, {}};
    CHECK_THROWS_WITH_AS(penrose_room(c1, overlap, 1.0), doctest::Contains("overlap"), std::invalid_argument);

    PenroseCap d2{"H2", make_body({{-1, -3}, {1, -3}}), {{1, -3}, {1, 0}}, {{-1, -3}, {1, 0}}, {}};
    CorridorSpec through;
    through.first.steps.push_back({PathStep::Kind::line, {0, 2.95}, {}, true});
    through.first.steps.push_back({PathStep::Kind::line, {-2, 0}, {}, true});
    CHECK_THROWS_WITH_AS(penrose_room(c1, d2, 1.0, through), doctest::Contains("crosses a cap"), std::invalid_argument);
}

TEST_CASE("validate_scene reports gaps, overlaps and orientation") {
    Scene s;
    s.kind = SceneKind::open_obstacles;
    BoundaryChain tri;
    tri.name = "tri";
    tri.elements = {{LineSegment{{0, 0}, {1, 0}}, false},
                    {LineSegment{{1, 0}, {0, 1}}, false},
                    {LineSegment{{0, 1}, {0, 1e-3}}, false}};
    s.chains.push_back(tri);
    finalize_scene(s);
    ValidationReport r = validate_scene(s);
    CHECK(has_violation(r, "not closed"));

    Scene two;
    two.kind = SceneKind::open_obstacles;
    for (double cx : {0.0, 1.5}) {
        BoundaryChain c;
        c.name = cx == 0.0 ? "left" : "right";
        c.elements = {{EllipticArc{{cx, 0}, {cx, 0}, 2.0, 0.0, pi}, false},
                      {EllipticArc{{cx, 0}, {cx, 0}, 2.0, pi, two_pi}, false}};
        two.chains.push_back(c);
    }
    finalize_scene(two);
    CHECK(has_violation(validate_scene(two), "chains intersect"));
    two.chains[1].elements = {{EllipticArc{{3, 0}, {3, 0}, 2.0, 0.0, pi}, false},
                              {EllipticArc{{3, 0}, {3, 0}, 2.0, pi, two_pi}, false}};
    finalize_scene(two);
    CHECK(validate_scene(two).ok());

    // A clockwise wall is rejected.
    Scene cw = mushroom_table(segment2(), 1.0);
    std::reverse(cw.chains[0].elements.begin(), cw.chains[0].elements.end());
    for (auto& ce : cw.chains[0].elements) ce.reversed = !ce.reversed;
    CHECK(has_violation(validate_scene(cw), "anticlockwise"));

    // A figure eight intersects itself.
    Scene eight;
    eight.kind = SceneKind::open_obstacles;
    BoundaryChain e;
    e.name = "eight";
    e.elements = {{LineSegment{{0, 0}, {2, 2}}, false},
                  {LineSegment{{2, 2}, {3, 0}}, false},
                  {LineSegment{{3, 0}, {0, 2}}, false},
                  {LineSegment{{0, 2}, {0, 0}}, false}};
    eight.chains.push_back(e);
    finalize_scene(eight);
    CHECK(has_violation(validate_scene(eight), "intersects itself"));
}

TEST_CASE("inside_chain handles arcs and reversed elements") {
    const Scene seg = mushroom_table(segment2(), 1.0);
    CHECK(inside_chain(seg.chains[0], {1.99, 0}));
    CHECK_FALSE(inside_chain(seg.chains[0], {2.01, 0}));
    CHECK(inside_chain(seg.chains[0], {0, 1.73}));
    CHECK_FALSE(inside_chain(seg.chains[0], {0, 1.74}));
    CHECK_FALSE(in_forbidden(seg, {0, 0}));
    CHECK(in_forbidden(seg, {0, -1.74}));
}
