#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "strbill/convex_body.hpp"
#include "strbill/scene.hpp"
#include "strbill/string_construction.hpp"

namespace strbill {

// One pass/fail check. max_violation is the largest measured deviation of the
// checked quantity; a sample whose deviation exceeds tolerance is a violation.
// A check without samples does not pass.
struct CheckRecord {
    std::string name;
    std::size_t samples{0};
    std::size_t violations{0};
    double max_violation{0.0};
    double tolerance{0.0};
    bool pass{false};

    void observe(double deviation);
};

struct VerifyReport {
    std::string suite;
    std::string subject;
    std::uint64_t seed{0};
    double wall_time{0.0};  // seconds; omitted from structured output
    std::vector<CheckRecord> checks;
    std::vector<std::pair<std::string, double>> values;  // measured statistics

    bool pass() const;
    CheckRecord& add(const std::string& name, double tolerance);
    const CheckRecord* find(const std::string& name) const;
};

std::string to_text(const VerifyReport& r);

constexpr double split_margin = 1e-7;

// Phase-space split on a mushroom table: n / 2 states on chords through H and
// n - n / 2 states whose first flight misses H, traced for N reflections each.
VerifyReport verify_split(const Scene& scene, std::size_t n, std::size_t N, std::uint64_t seed, unsigned threads = 0);

// Distance, level set, C1, turning, curvature and gradient checks on a table.
VerifyReport verify_geometry(const TableBoundary& table, std::size_t n, std::uint64_t seed = 1);

// Gradients of u+-, Jacobian of rope_point against the H-differential, and
// round trips, at n samples each.
VerifyReport verify_inverse_maps(const ConvexBody& body, std::size_t n, std::uint64_t seed);

// Hausdorff distance between the table for each lambda and the boundary of H.
// bound <= 0 selects 2 sqrt(lam L / 2 + lam^2) + lam for the last lambda.
VerifyReport verify_limit(const ConvexBody& body, const std::vector<double>& lambdas, double bound = 0.0);

// d_H between the table boundary and the boundary of H from 2048 samples per
// curve, with the largest sampled distances refined locally.
double hausdorff_to_body(const TableBoundary& table);

// Arc-inflation mutation: two_a of arc k grows by delta, keeping s0 and s1.
TableBoundary inflate_arc(const TableBoundary& table, std::size_t k, double delta);
Scene inflate_arc(const Scene& mushroom, std::size_t k, double delta);

}  // namespace strbill
