#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "strbill/dynamics.hpp"
#include "strbill/scene.hpp"
#include "test_support.hpp"

using namespace strbill;
using namespace testing_support;

namespace {

Scene disk_livshits() {
    return livshits_obstacle(regular_ngon(1024), {{-1, 0}, {0, 1}}, {{1, 0}, {0, 1}}, 0.5);
}

Scene standard_penrose() {
    PenroseCap c1{"H1", make_body({{-1, 3}, {1, 3}}), {{-1, 3}, {1, 0}}, {{1, 3}, {1, 0}}, {}};
    PenroseCap c2{"H2", make_body({{-1, -3}, {1, -3}}), {{1, -3}, {1, 0}}, {{-1, -3}, {1, 0}}, {}};
    return penrose_room(c1, c2, 1.0);
}

Vec2 random_unit(Rng& rng) { return unit(rng.uniform(0.0, two_pi)); }

// Nearest hit over every element, found without the index.
double brute_first_hit(const Scene& s, const Vec2& o, const Vec2& d) {
    double best = INFINITY;
    double t[2];
    for (const auto& c : s.chains)
        for (const auto& e : c.elements) {
            const int k = ray_hits(e.geom, o, d, s.index->eps_step, t);
            for (int i = 0; i < k; ++i) best = std::min(best, t[i]);
        }
    return best;
}

// Uniform start inside the table wall of a closed scene.
Vec2 random_inside(Rng& rng, const Scene& s) {
    for (;;) {
        const Vec2 q{rng.uniform(s.center.x - s.bounding_radius, s.center.x + s.bounding_radius),
                     rng.uniform(s.center.y - s.bounding_radius, s.center.y + s.bounding_radius)};
        if (!in_forbidden(s, q)) return q;
    }
}

// Distance of the line through p along d from being a supporting line of the body.
double support_gap(const ConvexBody& body, const Vec2& p, const Vec2& d) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : body.vertices) {
        const double c = cross(d, v - p);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    return std::min(std::fabs(lo), std::fabs(hi));
}

}  // namespace

TEST_CASE("reflect examples and identities") {
    const double h = std::sqrt(0.5);
    CHECK(dist(reflect({1, 0}, {-1, 0}), Vec2{-1, 0}) < 1e-15);
    CHECK(dist(reflect({h, h}, {0, -1}), Vec2{h, -h}) < 1e-15);
    CHECK(dist(reflect({1, 0}, {0, 1}), Vec2{1, 0}) < 1e-15);
    Rng rng(3);
    for (int k = 0; k < 1000; ++k) {
        const Vec2 v = random_unit(rng), nu = random_unit(rng);
        const Vec2 w = reflect(v, nu);
        CHECK(dist(reflect(w, nu), v) < 1e-12);
        CHECK(std::fabs(dot(w, nu) + dot(v, nu)) < 1e-12);
        CHECK(std::fabs(norm(w) - 1.0) < 1e-15);
    }
}

TEST_CASE("first_hit examples") {
    const Scene circle = mushroom_table(origin_point(), 1.0);
    const auto h = first_hit(circle, {{0, 0}, {1, 0}});
    REQUIRE(h);
    CHECK(dist(h->point, Vec2{1, 0}) < 1e-12);
    CHECK(dist(h->normal, Vec2{-1, 0}) < 1e-12);
    CHECK(h->cos_incidence < 0.0);
    CHECK_FALSE(h->tangency);

    const Scene ellipse = mushroom_table(segment2(), 1.0);
    const auto e = first_hit(ellipse, {{0, 0}, {0, 1}});
    REQUIRE(e);
    CHECK(dist(e->point, Vec2{0, std::sqrt(3.0)}) < 1e-12);
    CHECK(dist(e->normal, Vec2{0, -1}) < 1e-12);

    // Livshits scene: a state far outside, aimed away, escapes.
    const Scene liv = disk_livshits();
    CHECK_FALSE(first_hit(liv, {{10, 10}, normalized(Vec2{1, 1})}));
    const Trajectory tr = trace(liv, {{10, 10}, normalized(Vec2{1, 1})}, 10);
    CHECK(tr.termination == Termination::escaped);
    CHECK(tr.reflections() == 0);
    // Already outside the bounding circle: the exit is the start itself.
    CHECK(dist(tr.exit.q, Vec2{10, 10}) == 0.0);
    const Vec2 out_dir = normalized(Vec2{1, 1});
    const Vec2 near_rim = liv.center + out_dir * (0.999 * liv.bounding_radius);
    const Trajectory rim = trace(liv, {near_rim, out_dir}, 10);
    CHECK(rim.termination == Termination::escaped);
    CHECK(dist(rim.exit.q, liv.center) == doctest::Approx(liv.bounding_radius).epsilon(1e-12));

    CHECK_THROWS_AS(first_hit(circle, {{0, 0}, {2, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(trace(circle, {{NAN, 0}, {1, 0}}, 3), std::invalid_argument);
}

TEST_CASE("period-2 orbits") {
    const Scene circle = mushroom_table(origin_point(), 1.0);
    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        const Vec2 v = random_unit(rng);
        const Trajectory tr = trace(circle, {{0, 0}, v}, 10);
        REQUIRE(tr.events.size() == 10);
        CHECK(tr.termination == Termination::max_reflections);
        for (std::size_t i = 0; i < 10; ++i) {
            const Vec2 expect = i % 2 == 0 ? v : -v;
            CHECK(dist(tr.events[i].hit.point, expect) < 1e-9);
        }
    }

    const Scene ellipse = mushroom_table(segment2(), 1.0);
    const Trajectory tr = trace(ellipse, {{0, 0}, {0, 1}}, 10);
    REQUIRE(tr.events.size() == 10);
    const double b = std::sqrt(3.0);
    for (std::size_t i = 0; i < 10; ++i) CHECK(dist(tr.events[i].hit.point, Vec2{0, i % 2 == 0 ? b : -b}) < 1e-9);
    for (bool c : flight_crossings(tr, segment2())) CHECK(c);
}

TEST_CASE("flight_crossings in the elliptic table") {
    const Scene ellipse = mushroom_table(segment2(), 1.0);
    const Trajectory outside = trace(ellipse, {{1.9, 0}, {0, 1}}, 100);
    REQUIRE(outside.reflections() == 100);
    const auto out_flags = flight_crossings(outside, segment2());
    CHECK(out_flags.size() == 100);
    bool any = false;
    for (bool c : out_flags) any = any || c;
    CHECK_FALSE(any);

    const Trajectory inside = trace(ellipse, {{0.5, 0}, {0, 1}}, 100);
    REQUIRE(inside.reflections() == 100);
    bool all = true;
    for (bool c : flight_crossings(inside, segment2())) all = all && c;
    CHECK(all);
}

TEST_CASE("the index agrees with a brute-force nearest hit") {
    Rng rng(17);
    const std::vector<Scene> scenes{mushroom_table(unit_square(), 0.5), disk_livshits(), standard_penrose(),
                                    mushroom_table(regular_ngon(64), 0.3)};
    for (const Scene& s : scenes) {
        for (int k = 0; k < 2000; ++k) {
            const Vec2 o{rng.uniform(-1.2, 1.2) * s.bounding_radius + s.center.x,
                         rng.uniform(-1.2, 1.2) * s.bounding_radius + s.center.y};
            const Vec2 d = random_unit(rng);
            const double brute = brute_first_hit(s, o, d);
            const auto h = first_hit(s, {o, d});
            if (std::isinf(brute)) {
                CHECK_FALSE(h);
            } else {
                REQUIRE(h);
                CHECK(std::fabs(h->t - brute) <= 1e-12 * (1.0 + brute));
            }
        }
    }
}

TEST_CASE("free flights never cross a boundary element") {
    Rng rng(23);
    const Scene sq = mushroom_table(unit_square(), 0.5);
    const Scene room = standard_penrose();
    const Scene liv = disk_livshits();
    int flights = 0;
    for (int k = 0; k < 1000; ++k) {
        const Scene& s = k % 3 == 0 ? sq : (k % 3 == 1 ? room : liv);
        PhasePoint st{random_inside(rng, s), random_unit(rng)};
        const Trajectory tr = trace(s, st, 30);
        Vec2 from = st.q;
        Vec2 dir = st.v;
        for (const auto& e : tr.events) {
            const double len = dist(from, e.hit.point);
            const double t = brute_first_hit(s, from, dir);
            CHECK(t >= len * (1.0 - 1e-12) - 1e-12);
            ++flights;
            from = e.hit.point;
            dir = e.v_out;
        }
        if (tr.termination == Termination::escaped) CHECK(std::isinf(brute_first_hit(s, from, dir)));
    }
    CHECK(flights > 10000);
}

TEST_CASE("time reversibility") {
    Rng rng(29);
    const std::vector<Scene> scenes{mushroom_table(unit_square(), 0.5), mushroom_table(segment2(), 1.0),
                                    standard_penrose()};
    // Rounding errors grow exponentially in chaotic regions, so the
    // reflection count is chosen per table.
    const std::size_t counts[] = {25, 100, 15};
    int checked = 0;
    for (const Scene& s : scenes) {
        const std::size_t n = counts[&s - scenes.data()];
        for (int k = 0; k < 40; ++k) {
            const Trajectory fwd = trace(s, {random_inside(rng, s), random_unit(rng)}, n);
            if (fwd.termination != Termination::max_reflections) continue;
            // Arrive at the last hit point, then run the flight backwards.
            const Vec2 last = fwd.events.back().hit.point;
            const Vec2 v_in = fwd.events[n - 2].v_out;
            const Trajectory back = trace(s, {last, -v_in}, n - 1);
            REQUIRE(back.events.size() == n - 1);
            double worst = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
                worst = std::max(worst, dist(back.events[i].hit.point, fwd.events[n - 2 - i].hit.point));
            INFO("scene " << &s - scenes.data() << " sample " << k);
            CHECK(worst < 1e-6);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("supporting lines of H reflect into supporting lines") {
    Rng rng(31);
    const std::vector<std::pair<ConvexBody, double>> cases{
        {unit_square(), 0.5}, {segment2(), 1.0}, {regular_ngon(7), 0.3}, {random_polygon(rng), 0.7}};
    for (const auto& [body, lam] : cases) {
        const Scene s = mushroom_table(body, lam);
        for (int k = 0; k < 400; ++k) {
            // Supporting ray leaving a boundary point of H along its tangent direction.
            const double t = rng.uniform(0.0, body.L);
            const AngleInterval ti = turning_angle(body, t);
            const double theta = rng.uniform(ti.lo, ti.hi);
            const Vec2 start = point_at(body, t);
            const auto h = first_hit(s, {start, unit(theta)});
            REQUIRE(h);
            const Vec2 w = reflect(unit(theta), h->normal);
            CHECK(support_gap(body, h->point, w) < 1e-8);
        }
    }
}

TEST_CASE("Livshits states inside the hidden set stay trapped") {
    const Scene liv = disk_livshits();
    Rng rng(37);
    for (int k = 0; k < 64; ++k) {
        // Interior point of the disk, away from the cap.
        const double r = 0.9 * std::sqrt(rng.uniform());
        const Vec2 q = unit(rng.uniform(0.0, two_pi)) * r;
        const TraceSummary t = trace_summary(liv, {q, random_unit(rng)}, 200);
        CHECK(t.termination == Termination::max_reflections);
        CHECK(t.reflections == 200);
    }
}

TEST_CASE("trace_summary matches trace and reports flights") {
    const Scene s = standard_penrose();
    Rng rng(41);
    for (int k = 0; k < 50; ++k) {
        const PhasePoint st{random_inside(rng, s), random_unit(rng)};
        const Trajectory tr = trace(s, st, 40);
        std::vector<double> lens;
        const FlightVisitor vis = [&](const Vec2&, const Vec2&, double len) { lens.push_back(len); };
        const TraceSummary sum = trace_summary(s, st, 40, &vis);
        CHECK(sum.termination == tr.termination);
        CHECK(sum.reflections == tr.reflections());
        CHECK(sum.length == tr.length);
        CHECK(lens.size() == tr.events.size());
    }
    const TraceSummary none = trace_summary(s, {{0, 0}, {1, 0}}, 0);
    CHECK(none.reflections == 0);
}

TEST_CASE("genuine corners terminate, C1 junctions do not") {
    // Square room: a ray into the corner stops there.
    Scene room;
    room.kind = SceneKind::room;
    BoundaryChain wall{"wall", ChainRole::room_wall, {}};
    const std::vector<Vec2> sq{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (std::size_t i = 0; i < 4; ++i) wall.elements.push_back({LineSegment{sq[i], sq[(i + 1) % 4]}, false});
    room.chains.push_back(wall);
    finalize_scene(room);
    const Trajectory tr = trace(room, {{0, 0}, normalized(Vec2{1, 1})}, 5);
    CHECK(tr.termination == Termination::corner);
    REQUIRE(tr.events.size() == 1);
    CHECK(tr.events[0].hit.corner);
    CHECK(tr.reflections() == 0);

    // The square mushroom has 8 C1 junctions; aim straight at each one.
    const Scene mush = mushroom_table(unit_square(), 0.5);
    for (const auto& e : mush.chains[0].elements) {
        const Vec2 j = e.start();
        const Vec2 q{0.5, 0.5};
        const TraceSummary t = trace_summary(mush, {q, normalized(j - q)}, 3);
        CHECK(t.termination == Termination::max_reflections);
    }
}
