#include "forestscan/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "forestscan/rng.hpp"

namespace forestscan {

namespace {
constexpr uint64_t tag_nuc_disk = stream_tag("nuc-disk");
}

void validate(const RegionOfInterest& region) {
    if (!(region.width > 0.0) || !(region.depth > 0.0))
        throw std::invalid_argument("region width and depth must be positive");
}

void validate(const MetricsParams& params) {
    if (params.disks < 1) throw std::invalid_argument("disk count must be >= 1");
    if (!(params.area_ratio > 0.0 && params.area_ratio < 1.0))
        throw std::invalid_argument("area ratio must be in (0, 1)");
}

bool params_overcover(const MetricsParams& params) {
    return static_cast<double>(params.disks) * params.area_ratio > 1.0;
}

double infra_d(const std::vector<Vec3>& points, const RegionOfInterest& region) {
    validate(region);
    uint64_t n = 0;
    for (const auto& p : points)
        if (region.contains(p.x, p.y)) ++n;
    return static_cast<double>(n) / region.area();
}

std::vector<std::pair<double, double>> nuc_disk_centers(const RegionOfInterest& region,
                                                        double radius, uint32_t disks,
                                                        uint64_t seed) {
    std::vector<std::pair<double, double>> centers(disks);
    for (uint32_t i = 0; i < disks; ++i) {
        KeyedRng rng(seed, tag_nuc_disk, i);
        double x_lo = region.x0 + radius, x_hi = region.x0 + region.width - radius;
        double y_lo = region.y0 + radius, y_hi = region.y0 + region.depth - radius;
        // A disk wider than the region degenerates to its center line.
        double cx = x_lo < x_hi ? rng.next_double(x_lo, x_hi) : region.x0 + region.width / 2.0;
        double cy = y_lo < y_hi ? rng.next_double(y_lo, y_hi) : region.y0 + region.depth / 2.0;
        centers[i] = {cx, cy};
    }
    return centers;
}

double nuc_from_counts(const std::vector<uint64_t>& counts, uint64_t points_in_region,
                       double area_ratio) {
    if (counts.empty()) throw std::invalid_argument("need at least one disk count");
    if (points_in_region == 0)
        throw std::invalid_argument("uniformity is undefined with no points in the region");

    const double expected = static_cast<double>(points_in_region) * area_ratio;
    std::vector<double> normalized(counts.size());
    for (size_t i = 0; i < counts.size(); ++i)
        normalized[i] = static_cast<double>(counts[i]) / expected;

    double mean = 0.0;
    for (double v : normalized) mean += v;
    mean /= static_cast<double>(normalized.size());

    double variance = 0.0;
    for (double v : normalized) variance += (v - mean) * (v - mean);
    variance /= static_cast<double>(normalized.size());
    return std::sqrt(variance);
}

double infra_nuc(const std::vector<Vec3>& points, const RegionOfInterest& region,
                 const MetricsParams& params) {
    validate(region);
    validate(params);

    uint64_t n_inside = 0;
    for (const auto& p : points)
        if (region.contains(p.x, p.y)) ++n_inside;
    if (n_inside == 0)
        throw std::invalid_argument("uniformity is undefined with no points in the region");

    const double radius = std::sqrt(params.area_ratio * region.area() / pi);
    auto centers = nuc_disk_centers(region, radius, params.disks, params.seed);

    std::vector<uint64_t> counts(centers.size(), 0);
    const double r2 = radius * radius;
    for (const auto& p : points) {
        for (size_t i = 0; i < centers.size(); ++i) {
            double dx = p.x - centers[i].first;
            double dy = p.y - centers[i].second;
            if (dx * dx + dy * dy <= r2) ++counts[i];
        }
    }
    return nuc_from_counts(counts, n_inside, params.area_ratio);
}

namespace {

// Uniform grid over the target set; nearest() expands Chebyshev rings of
// cells outward until no unvisited cell can beat the incumbent distance.
class NearestGrid {
public:
    explicit NearestGrid(const std::vector<Vec3>& points) : points_(points) {
        mn_ = mx_ = points[0];
        for (const auto& p : points) {
            mn_ = min_components(mn_, p);
            mx_ = max_components(mx_, p);
        }
        Vec3 extent = mx_ - mn_;
        long target = std::max<long>(1, std::lround(std::cbrt(static_cast<double>(points.size()))));
        double ext[3] = {extent.x, extent.y, extent.z};
        for (int a = 0; a < 3; ++a) {
            dims_[a] = ext[a] > 0.0 ? std::clamp<long>(target, 1, 64) : 1;
            cell_[a] = ext[a] > 0.0 ? ext[a] / static_cast<double>(dims_[a]) : 1.0;
        }
        min_cell_ = std::min({cell_[0], cell_[1], cell_[2]});
        cells_.resize(static_cast<size_t>(dims_[0] * dims_[1] * dims_[2]));
        for (uint32_t i = 0; i < points_.size(); ++i)
            cells_[flat(clamped_coords(points_[i]))].push_back(i);
    }

    double nearest_squared(const Vec3& q) const {
        long cq[3] = {raw_coord(q.x, 0), raw_coord(q.y, 1), raw_coord(q.z, 2)};
        long ring_start = 0, ring_end = 0;
        for (int a = 0; a < 3; ++a) {
            long below = cq[a] < 0 ? -cq[a] : 0;
            long above = cq[a] > dims_[a] - 1 ? cq[a] - (dims_[a] - 1) : 0;
            ring_start = std::max({ring_start, below, above});
            ring_end = std::max({ring_end, std::labs(cq[a]), std::labs(dims_[a] - 1 - cq[a])});
        }

        double best = std::numeric_limits<double>::infinity();
        for (long ring = ring_start; ring <= ring_end; ++ring) {
            if (std::isfinite(best)) {
                // Cells beyond this ring are at least (ring-1)*min_cell away.
                double bound = static_cast<double>(ring - 1) * min_cell_;
                if (bound > 0.0 && bound * bound >= best) break;
            }
            long lo[3], hi[3];
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::max(0L, cq[a] - ring);
                hi[a] = std::min(dims_[a] - 1, cq[a] + ring);
            }
            for (long x = lo[0]; x <= hi[0]; ++x)
                for (long y = lo[1]; y <= hi[1]; ++y)
                    for (long z = lo[2]; z <= hi[2]; ++z) {
                        long cheb = std::max({std::labs(x - cq[0]), std::labs(y - cq[1]),
                                              std::labs(z - cq[2])});
                        if (cheb != ring) continue;
                        for (uint32_t i : cells_[flat_xyz(x, y, z)])
                            best = std::min(best, norm_squared(points_[i] - q));
                    }
        }
        return best;
    }

private:
    long raw_coord(double v, int axis) const {
        double base = axis == 0 ? mn_.x : axis == 1 ? mn_.y : mn_.z;
        return static_cast<long>(std::floor((v - base) / cell_[axis]));
    }

    std::array<long, 3> clamped_coords(const Vec3& p) const {
        return {std::clamp(raw_coord(p.x, 0), 0L, dims_[0] - 1),
                std::clamp(raw_coord(p.y, 1), 0L, dims_[1] - 1),
                std::clamp(raw_coord(p.z, 2), 0L, dims_[2] - 1)};
    }

    size_t flat_xyz(long x, long y, long z) const {
        return static_cast<size_t>((x * dims_[1] + y) * dims_[2] + z);
    }
    size_t flat(const std::array<long, 3>& c) const { return flat_xyz(c[0], c[1], c[2]); }

    const std::vector<Vec3>& points_;
    Vec3 mn_, mx_;
    long dims_[3] = {1, 1, 1};
    double cell_[3] = {1.0, 1.0, 1.0};
    double min_cell_ = 1.0;
    std::vector<std::vector<uint32_t>> cells_;
};

double directed_mean(const std::vector<Vec3>& from, const NearestGrid& grid, bool squared) {
    double sum = 0.0;
    for (const auto& p : from) {
        double d2 = grid.nearest_squared(p);
        sum += squared ? d2 : std::sqrt(d2);
    }
    return sum / static_cast<double>(from.size());
}

double directed_mean_brute(const std::vector<Vec3>& from, const std::vector<Vec3>& to,
                           bool squared) {
    double sum = 0.0;
    for (const auto& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to) best = std::min(best, norm_squared(p - q));
        sum += squared ? best : std::sqrt(best);
    }
    return sum / static_cast<double>(from.size());
}

} // namespace

double chamfer(const std::vector<Vec3>& p, const std::vector<Vec3>& q, bool squared) {
    if (p.empty() || q.empty()) throw std::invalid_argument("chamfer needs non-empty point sets");
    NearestGrid grid_q(q);
    NearestGrid grid_p(p);
    return directed_mean(p, grid_q, squared) + directed_mean(q, grid_p, squared);
}

double chamfer_brute(const std::vector<Vec3>& p, const std::vector<Vec3>& q, bool squared) {
    if (p.empty() || q.empty()) throw std::invalid_argument("chamfer needs non-empty point sets");
    return directed_mean_brute(p, q, squared) + directed_mean_brute(q, p, squared);
}

} // namespace forestscan
