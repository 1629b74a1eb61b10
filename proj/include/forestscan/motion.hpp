#pragma once

#include <optional>
#include <vector>

#include "forestscan/vec3.hpp"

namespace forestscan {

struct ScanPath {
    std::vector<Vec3> control_points; // >= 2, consecutive points distinct
    double walk_speed = 1.0;          // m/s
};

struct SwayConfig {
    double amp_vertical = 0.0;   // m
    double freq_vertical = 0.0;  // Hz
    double phase_vertical = 0.0; // rad
    double amp_lateral = 0.0;    // m
    double freq_lateral = 0.0;   // Hz
    double phase_lateral = 0.0;  // rad
};

// Vertical bounce at step rate, lateral sway at stride rate.
inline SwayConfig default_sway() {
    return {0.05, 2.0, 0.0, 0.04, 1.0, 0.0};
}

struct Pose {
    Vec3 position;
    double yaw = 0.0; // rad, heading of the path tangent
};

// Centripetal Catmull-Rom through the control points (endpoints duplicated),
// reparameterized by arc length through a piecewise-linear lookup table.
class PathSampler {
public:
    PathSampler(const ScanPath& path, int samples_per_segment = 128);

    double total_length() const { return total_length_; }
    double walk_speed() const { return walk_speed_; }
    Vec3 point_at(double s) const;
    Vec3 tangent_at(double s) const; // unit

    // Spline position at the raw segment parameter; used by tests to verify
    // knot interpolation independent of the arc-length table.
    Vec3 eval_segment(int segment, double u) const;
    int segment_count() const { return static_cast<int>(segments_.size()); }

private:
    struct Segment {
        Vec3 p[4];
        double knot[4];
    };
    struct TableEntry {
        double s;       // cumulative arc length
        int segment;
        double u;       // normalized parameter in [0, 1] within the segment
    };

    void locate(double s, int& segment, double& u) const;
    Vec3 eval_derivative(int segment, double u) const;

    std::vector<Segment> segments_;
    std::vector<TableEntry> table_;
    double total_length_ = 0.0;
    double walk_speed_ = 1.0;
};

// (dz, dlat) displacement at time t.
std::pair<double, double> sway(const SwayConfig& config, double t);

// Pose of the carrier at time t: spline position at arc length walk_speed*t
// plus sway, with yaw following the path tangent. Returns nothing once the
// path end is passed.
std::optional<Pose> pose_at(const PathSampler& sampler, const SwayConfig& sway_config, double t,
                            double mount_height);

} // namespace forestscan
