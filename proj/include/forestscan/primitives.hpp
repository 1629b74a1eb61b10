#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "forestscan/vec3.hpp"

namespace forestscan {

// Label codes are frozen; they appear verbatim in CSV and PLY output.
enum class LeafWood : uint8_t { NotApplicable = 0, Wood = 1, Leaf = 2 };
enum class Semantic : uint8_t { Ground = 0, Tree = 1, Stone = 2, Shrub = 3 };

struct Triangle {
    Vec3 a, b, c;
};

// Frustum segment: `axis` runs from the base center to the top center,
// so |axis| is the segment height. Lateral surface only, no caps.
struct TruncatedCone {
    Vec3 base_center;
    Vec3 axis;
    double base_radius = 0.0;
    double top_radius = 0.0;
};

struct Disc {
    Vec3 center;
    Vec3 normal; // unit
    double radius = 0.0;
};

using Geometry = std::variant<Triangle, TruncatedCone, Disc>;

struct LabeledPrimitive {
    Geometry geometry;
    LeafWood leaf_wood = LeafWood::NotApplicable;
    Semantic semantic = Semantic::Ground;
    uint32_t instance = 0;
};

struct Aabb {
    Vec3 min{1e300, 1e300, 1e300};
    Vec3 max{-1e300, -1e300, -1e300};

    void expand(const Vec3& p) {
        min = min_components(min, p);
        max = max_components(max, p);
    }
    void expand(const Aabb& b) {
        min = min_components(min, b.min);
        max = max_components(max, b.max);
    }
    Vec3 center() const { return (min + max) * 0.5; }
    bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }
};

Aabb primitive_bounds(const LabeledPrimitive& prim);

// Nearest positive intersection parameter along a unit-direction ray,
// restricted to (0, t_max]. Returns nothing on a miss.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, double t_max,
                                         const Triangle& tri);
std::optional<double> intersect_cone(const Vec3& origin, const Vec3& dir, double t_max,
                                     const TruncatedCone& cone);
std::optional<double> intersect_disc(const Vec3& origin, const Vec3& dir, double t_max,
                                     const Disc& disc);
std::optional<double> intersect_primitive(const Vec3& origin, const Vec3& dir, double t_max,
                                          const LabeledPrimitive& prim);

// Slab test; entry distance written to t_entry when the box is hit.
bool intersect_aabb(const Vec3& origin, const Vec3& inv_dir, double t_max, const Aabb& box,
                    double& t_entry);

} // namespace forestscan
