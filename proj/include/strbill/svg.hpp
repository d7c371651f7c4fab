#pragma once

#include <string>
#include <vector>

#include "strbill/classification.hpp"
#include "strbill/dynamics.hpp"
#include "strbill/scene.hpp"
#include "strbill/scene_file.hpp"

namespace strbill {

// Optional layers drawn over a scene. Pointers are borrowed for the call.
struct Overlays {
    std::vector<std::vector<Vec2>> trajectories;
    const IlluminationMap* illumination{nullptr};
    const RegionScan* scan{nullptr};
};

// Start point followed by every reflection point, ending at the exit point.
std::vector<Vec2> trajectory_polyline(const Trajectory& t);

// SVG 1.1 document. Layers in drawing order: heatmap, bodies, dark, walls,
// trajectories; a layer is omitted when disabled or empty. Walls are one path
// per chain with elliptic arcs as A commands; numbers use 9 significant digits.
std::string render_svg(const Scene& scene, const Overlays& overlays, const RenderSpec& spec);

// Number formatting used in the document.
std::string svg_number(double x);

}  // namespace strbill
