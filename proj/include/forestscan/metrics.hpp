#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "forestscan/vec3.hpp"

namespace forestscan {

// Ground-plane rectangle the density/uniformity metrics are computed over.
// Membership uses (x, y) only: min edges inclusive, max edges exclusive.
struct RegionOfInterest {
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 0.0;
    double depth = 0.0;

    double area() const { return width * depth; }
    bool contains(double x, double y) const {
        return x >= x0 && x < x0 + width && y >= y0 && y < y0 + depth;
    }
};

void validate(const RegionOfInterest& region);

struct MetricsParams {
    uint32_t disks = 20;      // D
    double area_ratio = 0.05; // p, disk area / region area
    uint64_t seed = 0;
};

void validate(const MetricsParams& params);

// D * p > 1 oversamples the region; legal but worth a warning.
bool params_overcover(const MetricsParams& params);

// Point density N/S inside the region.
double infra_d(const std::vector<Vec3>& points, const RegionOfInterest& region);

// Disk centers drawn uniformly over the region shrunk inward by the disk
// radius, so every disk lies inside the region.
std::vector<std::pair<double, double>> nuc_disk_centers(const RegionOfInterest& region,
                                                        double radius, uint32_t disks,
                                                        uint64_t seed);

// Population standard deviation of the normalized per-disk counts
// n_i / (N * p); the core of the uniformity coefficient.
double nuc_from_counts(const std::vector<uint64_t>& counts, uint64_t points_in_region,
                       double area_ratio);

double infra_nuc(const std::vector<Vec3>& points, const RegionOfInterest& region,
                 const MetricsParams& params);

// Bidirectional mean nearest-neighbor distance; `squared` switches the
// summed distances to their squares. Grid-accelerated; chamfer_brute is the
// reference the grid must match exactly.
double chamfer(const std::vector<Vec3>& p, const std::vector<Vec3>& q, bool squared = false);
double chamfer_brute(const std::vector<Vec3>& p, const std::vector<Vec3>& q,
                     bool squared = false);

} // namespace forestscan
