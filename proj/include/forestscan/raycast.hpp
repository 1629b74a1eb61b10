#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "forestscan/primitives.hpp"

namespace forestscan {

struct Ray {
    Vec3 origin;
    Vec3 direction; // unit
    double t_max = 0.0;
};

struct Hit {
    Vec3 point;
    double distance = 0.0;
    uint32_t primitive_index = 0;
    LeafWood leaf_wood = LeafWood::NotApplicable;
    Semantic semantic = Semantic::Ground;
    uint32_t instance = 0;
};

// Hits closer than this are considered tied and resolved by primitive index,
// so adjacent terrain triangles sharing an edge resolve deterministically.
inline constexpr double hit_tie_epsilon = 1e-9;

// Is `candidate` (distance, index) preferred over the incumbent?
inline bool hit_beats(double cand_dist, uint32_t cand_index, double best_dist,
                      uint32_t best_index) {
    double diff = cand_dist - best_dist;
    if (diff <= -hit_tie_epsilon) return true;
    if (diff >= hit_tie_epsilon) return false;
    return cand_index < best_index;
}

// Median-split BVH over primitive bounding boxes. Nodes are stored in a flat
// array; an internal node's children are adjacent at `start`.
class Bvh {
public:
    struct Node {
        Aabb box;
        uint32_t start = 0; // child index (internal) or first primitive slot (leaf)
        uint16_t count = 0; // 0 for internal nodes
        uint16_t axis = 0;
    };

    static Bvh build(std::span<const LabeledPrimitive> primitives);

    std::optional<Hit> intersect(const Ray& ray,
                                 std::span<const LabeledPrimitive> primitives) const;

    const std::vector<Node>& nodes() const { return nodes_; }

private:
    std::vector<Node> nodes_;
    std::vector<uint32_t> order_; // primitive indices, leaf ranges are contiguous
};

// Exhaustive reference caster; the oracle the BVH must agree with exactly.
std::optional<Hit> intersect_brute(const Ray& ray, std::span<const LabeledPrimitive> primitives);

inline Bvh build_accelerator(std::span<const LabeledPrimitive> primitives) {
    return Bvh::build(primitives);
}

} // namespace forestscan
