#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strbill/convex_body.hpp"
#include "strbill/elements.hpp"
#include "strbill/string_construction.hpp"

namespace strbill {

enum class SceneKind { closed_table, open_obstacles, room };
enum class ChainRole { table_wall, room_wall, obstacle, cap };

const char* to_string(SceneKind k);
const char* to_string(ChainRole r);

struct BoundaryChain {
    std::string name;
    ChainRole role{ChainRole::obstacle};
    std::vector<ChainElement> elements;
};

// Supporting line of H through an anchor vertex.
struct AnchorLine {
    Vec2 point;
    Vec2 direction;
    bool operator==(const AnchorLine&) const = default;
};

// One step of a user path: a straight segment to `to`, or a circular arc to
// `to` about `center` (anticlockwise when ccw is true).
struct PathStep {
    enum class Kind { line, arc } kind{Kind::line};
    Vec2 to;
    Vec2 center;
    bool ccw{true};
    bool operator==(const PathStep&) const = default;
};

// Explicit path between two fixed endpoints. An empty path selects the default.
struct ClosureSpec {
    std::vector<PathStep> steps;
    // Default cap: outward offset of the hidden boundary arc (relative to diam H).
    double cap_thickness{0.02};
    // Default closure: extra radius beyond the essential curve (relative to diam H).
    double margin{0.25};
    bool operator==(const ClosureSpec&) const = default;
};

// Resolved geometry of one hidden body with anchors.
struct HiddenRegion {
    std::string name;
    ConvexBody body;
    std::size_t a{0};  // vertex index of A
    std::size_t b{0};  // vertex index of B
    std::size_t m{0};  // edges from B anticlockwise to A
    double theta_a{0.0};
    double theta_b{0.0};
    Vec2 A, B, A_prime, B_prime;
    double lam{0.0};
    double lambda_max{0.0};
    std::vector<SweepArc> essential;
};

struct SceneIndex;

struct Scene {
    SceneKind kind{SceneKind::closed_table};
    std::vector<BoundaryChain> chains;
    std::vector<ConvexBody> bodies;
    std::vector<std::string> body_names;
    std::vector<HiddenRegion> hidden;      // livshits and penrose scenes
    std::optional<TableBoundary> table;    // mushroom scenes
    double lam{0.0};
    Vec2 center;
    double bounding_radius{0.0};           // every chain lies inside this disk about center
    double diameter{0.0};
    std::shared_ptr<const SceneIndex> index;

    std::size_t element_count() const;
};

// Recompute bounds and acceleration data after editing chains by hand.
void finalize_scene(Scene& scene);

Scene mushroom_table(const ConvexBody& body, double lam, const std::string& name = "H");

double lambda_max(const ConvexBody& body, const AnchorLine& A, const AnchorLine& B);

HiddenRegion resolve_hidden(const ConvexBody& body, const AnchorLine& A, const AnchorLine& B, double lam);

Scene livshits_obstacle(const ConvexBody& body, const AnchorLine& A, const AnchorLine& B, double lam,
                        const ClosureSpec& cap = {}, const ClosureSpec& closure = {}, const std::string& name = "H");

struct PenroseCap {
    std::string name;
    ConvexBody body;
    AnchorLine A;
    AnchorLine B;
    ClosureSpec cap;
};

// first runs from A'_1 to B'_2, second from A'_2 to B'_1; empty paths are straight.
struct CorridorSpec {
    ClosureSpec first;
    ClosureSpec second;
    bool operator==(const CorridorSpec&) const = default;
};

Scene penrose_room(const PenroseCap& cap1, const PenroseCap& cap2, double lam, const CorridorSpec& corridor = {});

// Potential with the string clamped to the essential arc: bounded tangent
// points stay at A and B while the free side passes the mouth lines.
double modified_potential(const HiddenRegion& h, const Vec2& p);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_scene(const Scene& scene);

// Even-odd containment against one closed chain.
bool inside_chain(const BoundaryChain& chain, const Vec2& p);
// Signed area of the flattened chain (positive when anticlockwise).
double chain_area(const BoundaryChain& chain);
// True when p lies strictly inside some obstacle or cap, or outside the
// table or room wall.
bool in_forbidden(const Scene& scene, const Vec2& p);

}  // namespace strbill
