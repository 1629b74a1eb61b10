#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forestscan/error_model.hpp"
#include "forestscan/motion.hpp"
#include "forestscan/point_record.hpp"
#include "forestscan/scene.hpp"
#include "forestscan/vec3.hpp"

namespace forestscan {

struct SensorConfig {
    std::vector<double> vertical_angles_deg; // strictly increasing
    double azimuth_resolution_deg = 0.2;
    double spin_rpm = 1200.0;
    double horizontal_fov_deg = 360.0;
    double max_range = 100.0;
    double mount_height = 1.8; // sensor above carrier position, m
    DivergenceTable divergence;
    ErrorOption error_option = ErrorOption::None;

    size_t beam_count() const { return vertical_angles_deg.size(); }
    double columns_per_second() const {
        return spin_rpm / 60.0 * (360.0 / azimuth_resolution_deg);
    }
};

void validate(const SensorConfig& config);

enum class PresetName { Beams8, Beams16, Beams64, Beams256 };

inline constexpr PresetName all_presets[] = {PresetName::Beams8, PresetName::Beams16,
                                             PresetName::Beams64, PresetName::Beams256};

SensorConfig preset(PresetName name);
const char* preset_label(PresetName name);
std::optional<PresetName> preset_from_label(std::string_view label);

// Direction of a beam fired at `psi` radians about +z (yaw + azimuth) and
// `elevation` radians above the horizontal plane.
inline Vec3 direction_from_angles(double psi, double elevation) {
    double ce = std::cos(elevation);
    return {ce * std::cos(psi), ce * std::sin(psi), std::sin(elevation)};
}

inline Vec3 beam_direction(double yaw_rad, double azimuth_deg, double elevation_deg) {
    return direction_from_angles(yaw_rad + radians(azimuth_deg), radians(elevation_deg));
}

// Column scheduling under the FPS constraint: emitting floor of the running
// column budget each frame keeps the long-run columns/frame ratio exact (the
// budget is recomputed from frame count, so no per-frame rounding accumulates).
struct FrameSchedule {
    double fps = 30.0;
    double columns_per_second = 0.0;
    double azimuth_step_deg = 0.2;
    double horizontal_fov_deg = 360.0;
    uint64_t frames_emitted = 0;
    uint64_t columns_emitted = 0;
    double azimuth_cursor_deg = 0.0;
};

FrameSchedule make_schedule(const SensorConfig& config, double fps);

// Azimuths (degrees, in [0, horizontal_fov)) of the columns fired during the
// next frame; advances the schedule.
std::vector<double> advance_schedule(FrameSchedule& schedule);

struct ScanStats {
    uint64_t rays = 0; // scheduled firings (columns x beams)
    uint64_t hits = 0;
    uint64_t semantic_counts[4] = {0, 0, 0, 0};
    uint64_t leaf_wood_counts[3] = {0, 0, 0};

    ScanStats& operator+=(const ScanStats& o);
};

// Casts every (column, beam) pair of one frame from the carrier pose (the
// sensor sits mount_height above it). Error draws are keyed by
// (frame, column, beam) so results are independent of execution order.
std::vector<PointRecord> scan_frame(const Scene& scene, const Pose& carrier,
                                    const SensorConfig& config,
                                    const std::vector<double>& azimuths_deg,
                                    uint32_t frame_index, double frame_time,
                                    uint64_t error_seed, ScanStats& stats);

} // namespace forestscan
