#pragma once

#include <utility>
#include <vector>

#include "forestscan/rng.hpp"
#include "forestscan/vec3.hpp"

namespace forestscan {

enum class ErrorOption { None, CoordinateOffset, AngleOffset };

// Beam divergence as a step function of range: each segment gives the
// horizontal/vertical footprint semi-axes up to its distance bound.
struct DivergenceSegment {
    double upper_distance = 0.0; // m
    double h_div = 0.0;          // m
    double v_div = 0.0;          // m
};

struct DivergenceTable {
    std::vector<DivergenceSegment> segments; // strictly increasing upper_distance

    bool all_zero() const {
        for (const auto& s : segments)
            if (s.h_div != 0.0 || s.v_div != 0.0) return false;
        return true;
    }
};

void validate(const DivergenceTable& table, double max_range);

// Four equal steps approximating a ~3 mrad full-divergence device out to
// max_range; override in the run config for a specific sensor.
DivergenceTable default_divergence_table(double max_range);

// (h_div, v_div) of the first segment with upper_distance >= distance.
std::pair<double, double> divergence_at(const DivergenceTable& table, double distance);

// Offset in the plane perpendicular to the beam: `a` along the sensor
// horizontal axis, `b` along the vertical one.
struct EllipseOffset {
    double a = 0.0;
    double b = 0.0;
};

// Uniform over the (h_div, v_div) ellipse by rejection from its bounding
// rectangle; collapses to (0, 0) when either axis is zero.
EllipseOffset sample_ellipse_offset(KeyedRng& rng, double h_div, double v_div);

struct BeamFrame {
    Vec3 horizontal; // unit, perpendicular to the beam, parallel to the ground plane
    Vec3 vertical;   // unit, completes the right-handed frame
};

BeamFrame make_beam_frame(const Vec3& direction);

Vec3 apply_coordinate_offset(const Vec3& point, const EllipseOffset& offset,
                             const BeamFrame& frame);

// (delta azimuth, delta elevation) in radians, each uniform in
// [-arctan(div/distance), +arctan(div/distance)]. The caller re-casts the
// ray with the perturbed direction.
std::pair<double, double> perturb_angle(KeyedRng& rng, double distance, double h_div,
                                        double v_div);

} // namespace forestscan
