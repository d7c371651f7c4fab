#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "strbill/verification.hpp"
#include "test_support.hpp"

using namespace strbill;
using namespace testing_support;

namespace {

const CheckRecord& check(const VerifyReport& r, const std::string& name) {
    const CheckRecord* c = r.find(name);
    REQUIRE(c != nullptr);
    return *c;
}

double value(const VerifyReport& r, const std::string& key) {
    for (const auto& [k, v] : r.values)
        if (k == key) return v;
    FAIL("missing value " << key);
    return 0.0;
}

bool same_report(const VerifyReport& a, const VerifyReport& b) {
    if (a.suite != b.suite || a.subject != b.subject || a.seed != b.seed || a.checks.size() != b.checks.size() ||
        a.values != b.values)
        return false;
    for (std::size_t k = 0; k < a.checks.size(); ++k) {
        const auto &x = a.checks[k], &y = b.checks[k];
        if (x.name != y.name || x.samples != y.samples || x.violations != y.violations ||
            x.max_violation != y.max_violation || x.tolerance != y.tolerance || x.pass != y.pass)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("CheckRecord counts violations and needs samples") {
    CheckRecord c{"x", 0, 0, 0.0, 1.0, false};
    CHECK_FALSE(c.pass);
    c.observe(0.5);
    CHECK(c.pass);
    c.observe(2.0);
    c.observe(std::nan(""));
    CHECK_FALSE(c.pass);
    CHECK(c.violations == 2);
    CHECK(c.samples == 3);
    VerifyReport r;
    r.add("empty", 1.0);
    CHECK_FALSE(r.pass());
}

TEST_CASE("verify_split passes on the standard tables") {
    for (const auto& [body, lam] : {std::pair{segment2(), 1.0}, std::pair{unit_square(), 0.5}, std::pair{origin_point(), 1.0}}) {
        const Scene s = mushroom_table(body, lam);
        const VerifyReport r = verify_split(s, 2000, 50, 3);
        CHECK(r.pass());
        CHECK(check(r, "omega1_crosses_H").samples == 1000);
        CHECK(check(r, "omega2_misses_H").samples == 1000);
        CHECK(check(r, "omega1_crosses_H").violations == 0);
        CHECK(check(r, "omega2_misses_H").violations == 0);
        CHECK(value(r, "flights") == 2000 * 51);
    }
}

TEST_CASE("verify_split detects the arc-inflation mutation") {
    const Scene s = mushroom_table(segment2(), 1.0);
    const Scene m = inflate_arc(s, 0, 1e-2);
    CHECK(m.table->arcs[0].two_a == s.table->arcs[0].two_a + 1e-2);
    const VerifyReport r = verify_split(m, 2000, 50, 3);
    CHECK_FALSE(r.pass());
    std::size_t violations = 0;
    for (const auto& c : r.checks) violations += c.violations;
    CHECK(violations >= 1);
}

TEST_CASE("verify_split is deterministic across thread counts") {
    const Scene s = mushroom_table(unit_square(), 0.5);
    const VerifyReport a = verify_split(s, 600, 30, 9, 1);
    const VerifyReport b = verify_split(s, 600, 30, 9, 3);
    CHECK(same_report(a, b));
    CHECK_FALSE(same_report(a, verify_split(s, 600, 30, 10, 1)));
}

TEST_CASE("verify_split rejects other scenes") {
    const Scene liv = livshits_obstacle(regular_ngon(64), {{-1, 0}, {0, 1}}, {{1, 0}, {0, 1}}, 0.5);
    CHECK_THROWS_AS(verify_split(liv, 100, 10, 1), std::invalid_argument);
}

TEST_CASE("verify_geometry examples") {
    const VerifyReport sq = verify_geometry(level_curve(unit_square(), 0.5), 300);
    CHECK(sq.pass());
    CHECK(value(sq, "junctions") == 8);
    CHECK(value(sq, "min_distance") >= 0.5 - 1e-9);

    const VerifyReport seg = verify_geometry(level_curve(segment2(), 1.0), 300);
    CHECK(seg.pass());
    CHECK(std::fabs(value(seg, "min_distance") - 1.0) < 1e-9);

    // Curvature of the unit circle is 1 everywhere.
    const TableBoundary circle = level_curve(origin_point(), 1.0);
    const VerifyReport pt = verify_geometry(circle, 300);
    CHECK(pt.pass());
    for (double tau : {0.0, 1.0, 2.5, 6.0}) CHECK(std::fabs(boundary_eval(circle, tau).curvature - 1.0) < 1e-12);
}

TEST_CASE("verify_geometry detects the arc-inflation mutation") {
    for (const auto& body : {segment2(), unit_square()}) {
        const TableBoundary t = level_curve(body, 0.5);
        const VerifyReport r = verify_geometry(inflate_arc(t, 1, 1e-2), 200);
        CHECK_FALSE(r.pass());
        CHECK(check(r, "level_set").violations >= 1);
        CHECK(check(r, "closed_chain").violations >= 1);
    }
    CHECK_THROWS_AS(inflate_arc(level_curve(segment2(), 1.0), 5, 1e-2), std::invalid_argument);
}

TEST_CASE("verify_inverse_maps passes on the standard bodies") {
    for (const auto& body : {unit_square(), segment2(), origin_point(), regular_ngon(7)}) {
        const VerifyReport r = verify_inverse_maps(body, 300, 4);
        CHECK(r.pass());
        for (const auto& c : r.checks) CHECK(c.samples == 300);
    }
    // Round trip on the point body is exact.
    const VerifyReport p = verify_inverse_maps(origin_point(), 200, 5);
    CHECK(check(p, "round_trip").max_violation < 1e-14);
}

TEST_CASE("verify_limit reproduces the segment semi-minor axis") {
    // The table of a segment of length l is an ellipse with b = sqrt(lam l + lam^2).
    const VerifyReport r = verify_limit(segment2(), {1.0, 0.1, 0.01});
    CHECK(r.pass());
    CHECK(std::fabs(value(r, "d_H(lambda=1)") - std::sqrt(3.0)) < 1e-6);
    CHECK(std::fabs(value(r, "d_H(lambda=0.1)") - std::sqrt(0.21)) < 1e-6);
    CHECK(std::fabs(value(r, "d_H(lambda=0.01)") - std::sqrt(0.0201)) < 1e-6);
}

TEST_CASE("verify_limit on the point and the unit square") {
    const VerifyReport p = verify_limit(origin_point(), {1.0, 0.1});
    CHECK(p.pass());
    CHECK(std::fabs(value(p, "d_H(lambda=1)") - 1.0) < 1e-9);
    CHECK(std::fabs(value(p, "d_H(lambda=0.1)") - 0.1) < 1e-9);
    // Square: the farthest table point faces an edge midpoint; with tangent
    // length sqrt(1/4 + d^2) on both sides, 2 sqrt(1/4 + d^2) + 3 = 4 + 2 lam.
    const VerifyReport sq = verify_limit(unit_square(), {1.0, 0.1, 0.01});
    CHECK(sq.pass());
    for (double lam : {1.0, 0.1, 0.01}) {
        char key[64];
        std::snprintf(key, sizeof key, "d_H(lambda=%g)", lam);
        CHECK(std::fabs(value(sq, key) - std::sqrt(lam + lam * lam)) < 1e-6);
    }
    // A tight bound fails the last check.
    CHECK_FALSE(verify_limit(unit_square(), {1.0, 0.1}, 0.2).pass());
    CHECK_THROWS_AS(verify_limit(unit_square(), {0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(verify_limit(unit_square(), {}), std::invalid_argument);
    CHECK_THROWS_AS(verify_limit(unit_square(), {1.0, -0.1}), std::invalid_argument);
}

TEST_CASE("text reports list every check") {
    const VerifyReport r = verify_inverse_maps(unit_square(), 50, 1);
    const std::string t = to_text(r);
    CHECK(t.find("suite inverse") != std::string::npos);
    for (const auto& c : r.checks) CHECK(t.find(c.name) != std::string::npos);
}
