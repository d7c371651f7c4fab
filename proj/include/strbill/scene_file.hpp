#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "strbill/convex_body.hpp"
#include "strbill/scene.hpp"

namespace strbill {

// Parse or semantic error in a scene file. line is 1-based (0 when unknown);
// field is a dotted path such as "construction.lambda" or "bodies[0].n".
class SceneFileError : public std::invalid_argument {
public:
    SceneFileError(std::size_t line, std::string field, const std::string& message);
    std::size_t line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

enum class BodyShape { polygon, point, segment, regular_ngon };

const char* to_string(BodyShape s);

// A named convex body: an explicit vertex list or a primitive.
//   polygon       vertices (hull taken)
//   point         center
//   segment       length, center, angle (direction of the segment)
//   regular_ngon  n, radius, center, angle (polar angle of vertex 0)
struct BodySpec {
    std::string name{"H"};
    BodyShape shape{BodyShape::polygon};
    std::vector<Vec2> vertices;
    double length{0.0};
    std::size_t n{0};
    double radius{0.0};
    Vec2 center;
    double angle{0.0};

    ConvexBody build() const;
    bool operator==(const BodySpec&) const = default;
};

enum class ConstructionType { mushroom, livshits, penrose };

const char* to_string(ConstructionType t);

struct CapSpec {
    std::string body;
    AnchorLine A;
    AnchorLine B;
    ClosureSpec cap;
    bool operator==(const CapSpec&) const = default;
};

struct ConstructionSpec {
    ConstructionType type{ConstructionType::mushroom};
    double lambda{0.0};
    std::string body;        // mushroom and livshits
    AnchorLine A;            // livshits
    AnchorLine B;            // livshits
    ClosureSpec cap;         // livshits
    ClosureSpec closure;     // livshits
    std::vector<CapSpec> caps;  // penrose, exactly two
    CorridorSpec corridor;      // penrose
    bool operator==(const ConstructionSpec&) const = default;
};

struct SimulationSpec {
    std::size_t reflections{200};    // N, the reflection cutoff
    std::size_t n_dirs{512};
    std::size_t n_rays{100000};
    std::size_t samples{10000};      // verification sample count
    std::size_t grid_x{64};
    std::size_t grid_y{64};
    std::optional<double> rho;       // escape radius; at least the bounding radius
    std::uint64_t seed{1};
    bool operator==(const SimulationSpec&) const = default;
};

struct RenderSpec {
    double width{800.0};
    double height{800.0};
    double margin{20.0};
    bool show_bodies{true};
    bool show_walls{true};
    bool show_trajectories{true};
    bool show_heatmap{true};
    bool show_dark{true};
    std::string body_color{"#c8c8c8"};
    std::string wall_color{"#000000"};
    std::string cap_color{"#7f3f00"};
    std::string trajectory_color{"#d62728"};
    std::string heat_low{"#fff7bc"};
    std::string heat_high{"#cc4c02"};
    std::string free_color{"#ffffff"};
    std::string mixed_color{"#fdae61"};
    std::string hidden_color{"#2c7bb6"};
    std::string dark_color{"#1a1a1a"};
    double wall_width{1.5};
    double trajectory_width{0.5};
    double dark_width{0.5};
    bool operator==(const RenderSpec&) const = default;
};

struct SceneFile {
    std::vector<BodySpec> bodies;
    ConstructionSpec construction;
    SimulationSpec simulation;
    RenderSpec render;
    bool operator==(const SceneFile&) const = default;
};

struct LoadedScene {
    SceneFile file;
    Scene scene;
};

// Strict JSON reader: unknown fields, wrong types and out-of-range values are
// rejected; the construction is built and must pass validate_scene.
LoadedScene load_scene(const std::string& text);
SceneFile parse_scene(const std::string& text);

// Canonical JSON with every field written out.
std::string serialize_scene(const SceneFile& file);

// Builds the scene described by a file; errors name the offending field.
Scene build_scene(const SceneFile& file);

}  // namespace strbill
