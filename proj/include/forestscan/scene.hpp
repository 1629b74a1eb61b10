#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "forestscan/primitives.hpp"
#include "forestscan/raycast.hpp"

namespace forestscan {

struct TreeSpec {
    std::string species_name;
    double trunk_height = 0.0;      // m
    double dbh = 0.0;               // trunk diameter at 1.3 m, m
    double taper = 0.0;             // top/base trunk radius ratio, [0,1)
    double canopy_radius = 0.0;     // m
    double canopy_base_height = 0.0;// m above the root
    uint32_t leaf_count = 0;
    double leaf_radius = 0.0;       // m
};

struct SceneSpec {
    uint64_t seed = 0;
    std::pair<double, double> extent{0.0, 0.0}; // width, depth in m, centered on the origin
    std::pair<uint32_t, uint32_t> tree_count_range{0, 0};
    std::vector<std::pair<TreeSpec, double>> species_mix; // (spec, weight >= 0)
    double terrain_amplitude = 0.0;
    double terrain_cell = 1.0;
    double min_tree_spacing = 1.5;
};

struct InstanceInfo {
    Semantic semantic = Semantic::Ground;
    std::string species_name; // empty when not a tree
    Vec3 root;
};

// A finished scene is immutable and safe for concurrent ray queries.
struct Scene {
    std::vector<LabeledPrimitive> primitives;
    Bvh accelerator;
    Aabb bounds;
    std::map<uint32_t, InstanceInfo> instance_table;
    bool placement_gave_up = false;

    std::optional<Hit> intersect(const Ray& ray) const {
        return accelerator.intersect(ray, primitives);
    }
};

// Triangulated value-noise heightfield covering `extent`, labeled
// (NotApplicable, Ground, instance 0). Heights stay within +-amplitude.
std::vector<LabeledPrimitive> generate_terrain(uint64_t seed, std::pair<double, double> extent,
                                               double amplitude, double cell);

// Height of the triangulated terrain surface at (x, y); matches the mesh
// produced by generate_terrain, not the underlying smooth noise.
double terrain_height(uint64_t seed, std::pair<double, double> extent, double amplitude,
                      double cell, double x, double y);

// Cone-stack trunk plus a ball of leaf discs. The trunk radius profile is
// linear with radius dbh/2 at breast height (1.3 m) and top/base ratio
// `taper`; leaf_count == 0 builds a bare tree.
std::vector<LabeledPrimitive> build_tree(const TreeSpec& spec, uint32_t instance,
                                         const Vec3& root, uint64_t seed);

Scene generate_forest(const SceneSpec& spec);

// Rebuild accelerator, bounds after primitives/instances are filled in
// (scene loading path).
void finalize_scene(Scene& scene);

void validate(const TreeSpec& spec);
void validate(const SceneSpec& spec);

} // namespace forestscan
