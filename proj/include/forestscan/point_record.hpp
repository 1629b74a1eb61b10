#pragma once

#include <cstdint>

#include "forestscan/primitives.hpp"
#include "forestscan/vec3.hpp"

namespace forestscan {

// One collision point. `rel` is in the sensor frame (world point minus sensor
// origin, rotated by -yaw); `abs` is the world-frame point.
struct PointRecord {
    uint32_t frame = 0;
    double t = 0.0;       // s, frame timestamp
    uint32_t beam = 0;
    double azimuth = 0.0; // deg, column azimuth before yaw is applied
    Vec3 rel;
    Vec3 abs;
    LeafWood leaf_wood = LeafWood::NotApplicable;
    Semantic semantic = Semantic::Ground;
    uint32_t instance = 0;

    bool operator==(const PointRecord&) const = default;
};

} // namespace forestscan
