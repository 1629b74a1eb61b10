#include "forestscan/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace forestscan {

namespace {

constexpr int max_leaf_size = 4;

Hit make_hit(const Ray& ray, double t, uint32_t index, const LabeledPrimitive& prim) {
    Hit hit;
    hit.point = ray.origin + ray.direction * t;
    hit.distance = t;
    hit.primitive_index = index;
    hit.leaf_wood = prim.leaf_wood;
    hit.semantic = prim.semantic;
    hit.instance = prim.instance;
    return hit;
}

} // namespace

std::optional<Hit> intersect_brute(const Ray& ray, std::span<const LabeledPrimitive> primitives) {
    double best_t = std::numeric_limits<double>::infinity();
    uint32_t best_index = 0;
    bool found = false;
    for (uint32_t i = 0; i < primitives.size(); ++i) {
        auto t = intersect_primitive(ray.origin, ray.direction, ray.t_max, primitives[i]);
        if (!t) continue;
        if (!found || hit_beats(*t, i, best_t, best_index)) {
            best_t = *t;
            best_index = i;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    return make_hit(ray, best_t, best_index, primitives[best_index]);
}

Bvh Bvh::build(std::span<const LabeledPrimitive> primitives) {
    if (primitives.empty()) throw std::invalid_argument("Bvh::build: empty primitive list");

    std::vector<Aabb> boxes(primitives.size());
    std::vector<Vec3> centers(primitives.size());
    for (size_t i = 0; i < primitives.size(); ++i) {
        boxes[i] = primitive_bounds(primitives[i]);
        centers[i] = boxes[i].center();
    }

    Bvh bvh;
    bvh.order_.resize(primitives.size());
    std::iota(bvh.order_.begin(), bvh.order_.end(), 0u);
    bvh.nodes_.reserve(primitives.size() * 2);
    bvh.nodes_.emplace_back();

    struct Range {
        uint32_t node, start, end;
    };
    std::deque<Range> queue{{0, 0, static_cast<uint32_t>(primitives.size())}};

    while (!queue.empty()) {
        auto [node_id, start, end] = queue.front();
        queue.pop_front();

        Aabb box;
        for (uint32_t i = start; i < end; ++i) box.expand(boxes[bvh.order_[i]]);
        bvh.nodes_[node_id].box = box;

        if (end - start <= max_leaf_size) {
            bvh.nodes_[node_id].start = start;
            bvh.nodes_[node_id].count = static_cast<uint16_t>(end - start);
            continue;
        }

        // Median split along the widest axis of the centroid bounds.
        Aabb cbox;
        for (uint32_t i = start; i < end; ++i) cbox.expand(centers[bvh.order_[i]]);
        Vec3 extent = cbox.max - cbox.min;
        int axis = 0;
        if (extent.y > extent.x) axis = 1;
        if (extent.z > (axis == 0 ? extent.x : extent.y)) axis = 2;

        uint32_t mid = (start + end) / 2;
        // All-identical centroids still split at the midpoint, so
        // construction terminates on degenerate input.
        std::nth_element(bvh.order_.begin() + start, bvh.order_.begin() + mid,
                         bvh.order_.begin() + end, [&](uint32_t a, uint32_t b) {
                             const Vec3& ca = centers[a];
                             const Vec3& cb = centers[b];
                             double va = axis == 0 ? ca.x : axis == 1 ? ca.y : ca.z;
                             double vb = axis == 0 ? cb.x : axis == 1 ? cb.y : cb.z;
                             if (va != vb) return va < vb;
                             return a < b;
                         });

        uint32_t child = static_cast<uint32_t>(bvh.nodes_.size());
        bvh.nodes_[node_id].start = child;
        bvh.nodes_[node_id].count = 0;
        bvh.nodes_[node_id].axis = static_cast<uint16_t>(axis);
        bvh.nodes_.emplace_back();
        bvh.nodes_.emplace_back();
        queue.push_back({child, start, mid});
        queue.push_back({child + 1, mid, end});
    }

    bvh.nodes_.shrink_to_fit();
    return bvh;
}

std::optional<Hit> Bvh::intersect(const Ray& ray,
                                  std::span<const LabeledPrimitive> primitives) const {
    if (nodes_.empty()) return std::nullopt; // empty scene
    Vec3 inv_dir{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};

    double best_t = std::numeric_limits<double>::infinity();
    uint32_t best_index = 0;
    bool found = false;

    // Nodes are pruned against best_t + tie epsilon, never tighter: a hit
    // slightly behind the incumbent may still win the index tie-break, and
    // the brute-force oracle would have seen it.
    uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;

    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        double prune = found ? std::fmin(ray.t_max, best_t + hit_tie_epsilon) : ray.t_max;
        double t_entry;
        if (!intersect_aabb(ray.origin, inv_dir, prune, node.box, t_entry)) continue;

        if (node.count > 0) {
            for (uint16_t i = 0; i < node.count; ++i) {
                uint32_t prim_index = order_[node.start + i];
                auto t = intersect_primitive(ray.origin, ray.direction, ray.t_max,
                                             primitives[prim_index]);
                if (!t) continue;
                if (!found || hit_beats(*t, prim_index, best_t, best_index)) {
                    best_t = *t;
                    best_index = prim_index;
                    found = true;
                }
            }
        } else {
            // Near child first.
            double d = ray.direction.x;
            if (node.axis == 1) d = ray.direction.y;
            if (node.axis == 2) d = ray.direction.z;
            if (d >= 0.0) {
                stack[top++] = node.start + 1;
                stack[top++] = node.start;
            } else {
                stack[top++] = node.start;
                stack[top++] = node.start + 1;
            }
        }
    }

    if (!found) return std::nullopt;
    return make_hit(ray, best_t, best_index, primitives[best_index]);
}

} // namespace forestscan
