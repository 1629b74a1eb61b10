#include "forestscan/sensor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "forestscan/rng.hpp"

namespace forestscan {

namespace {
constexpr uint64_t tag_error = stream_tag("error");
// Guards floor() against representation error when the exact column budget is
// an integer (e.g. 300 frames x 160 cps / 30 fps = 1600).
constexpr double budget_epsilon = 1e-9;
} // namespace

void validate(const SensorConfig& config) {
    if (config.vertical_angles_deg.empty())
        throw std::invalid_argument("sensor needs at least one beam");
    for (size_t i = 1; i < config.vertical_angles_deg.size(); ++i)
        if (!(config.vertical_angles_deg[i - 1] < config.vertical_angles_deg[i]))
            throw std::invalid_argument("vertical angles must be strictly increasing");
    if (!(config.azimuth_resolution_deg > 0.0))
        throw std::invalid_argument("azimuth resolution must be positive");
    if (!(config.spin_rpm > 0.0))
        throw std::invalid_argument("spin rate must be positive");
    if (!(config.horizontal_fov_deg > 0.0 && config.horizontal_fov_deg <= 360.0))
        throw std::invalid_argument("horizontal fov must be in (0, 360]");
    if (!(config.max_range > 0.0))
        throw std::invalid_argument("max range must be positive");
    if (!(config.mount_height >= 0.0))
        throw std::invalid_argument("mount height must be non-negative");
    if (config.error_option != ErrorOption::None || !config.divergence.segments.empty())
        validate(config.divergence, config.max_range);
}

SensorConfig preset(PresetName name) {
    size_t beams = 0;
    switch (name) {
        case PresetName::Beams8: beams = 8; break;
        case PresetName::Beams16: beams = 16; break;
        case PresetName::Beams64: beams = 64; break;
        case PresetName::Beams256: beams = 256; break;
    }
    SensorConfig config;
    config.vertical_angles_deg.resize(beams);
    // Evenly spaced over the [-15, +15] degree vertical FOV, endpoints included.
    for (size_t i = 0; i < beams; ++i)
        config.vertical_angles_deg[i] =
            -15.0 + 30.0 * static_cast<double>(i) / static_cast<double>(beams - 1);
    config.azimuth_resolution_deg = 0.2;
    config.spin_rpm = 1200.0;
    config.horizontal_fov_deg = 360.0;
    config.max_range = 100.0;
    config.mount_height = 1.8;
    config.divergence = default_divergence_table(config.max_range);
    config.error_option = ErrorOption::None;
    return config;
}

const char* preset_label(PresetName name) {
    switch (name) {
        case PresetName::Beams8: return "beams8";
        case PresetName::Beams16: return "beams16";
        case PresetName::Beams64: return "beams64";
        case PresetName::Beams256: return "beams256";
    }
    return "";
}

std::optional<PresetName> preset_from_label(std::string_view label) {
    std::string lower(label);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (PresetName name : all_presets)
        if (lower == preset_label(name)) return name;
    return std::nullopt;
}

FrameSchedule make_schedule(const SensorConfig& config, double fps) {
    if (!(fps > 0.0)) throw std::invalid_argument("fps must be positive");
    FrameSchedule schedule;
    schedule.fps = fps;
    schedule.columns_per_second = config.columns_per_second();
    schedule.azimuth_step_deg = config.azimuth_resolution_deg;
    schedule.horizontal_fov_deg = config.horizontal_fov_deg;
    return schedule;
}

std::vector<double> advance_schedule(FrameSchedule& schedule) {
    double budget = static_cast<double>(schedule.frames_emitted + 1) *
                    schedule.columns_per_second / schedule.fps;
    auto target = static_cast<uint64_t>(std::floor(budget + budget_epsilon));
    uint64_t count = target > schedule.columns_emitted ? target - schedule.columns_emitted : 0;

    std::vector<double> azimuths(count);
    double cursor = schedule.azimuth_cursor_deg;
    for (uint64_t i = 0; i < count; ++i) {
        azimuths[i] = cursor;
        cursor += schedule.azimuth_step_deg;
        if (cursor >= schedule.horizontal_fov_deg)
            cursor = std::fmod(cursor, schedule.horizontal_fov_deg);
    }
    schedule.azimuth_cursor_deg = cursor;
    schedule.columns_emitted = target;
    schedule.frames_emitted += 1;
    return azimuths;
}

ScanStats& ScanStats::operator+=(const ScanStats& o) {
    rays += o.rays;
    hits += o.hits;
    for (int i = 0; i < 4; ++i) semantic_counts[i] += o.semantic_counts[i];
    for (int i = 0; i < 3; ++i) leaf_wood_counts[i] += o.leaf_wood_counts[i];
    return *this;
}

std::vector<PointRecord> scan_frame(const Scene& scene, const Pose& carrier,
                                    const SensorConfig& config,
                                    const std::vector<double>& azimuths_deg,
                                    uint32_t frame_index, double frame_time,
                                    uint64_t error_seed, ScanStats& stats) {
    std::vector<PointRecord> records;
    records.reserve(azimuths_deg.size() * config.beam_count());
    const Vec3 origin = carrier.position + Vec3{0.0, 0.0, config.mount_height};

    for (size_t column = 0; column < azimuths_deg.size(); ++column) {
        const double psi = carrier.yaw + radians(azimuths_deg[column]);
        for (size_t beam = 0; beam < config.beam_count(); ++beam) {
            ++stats.rays;
            const double elevation = radians(config.vertical_angles_deg[beam]);
            const Vec3 direction = direction_from_angles(psi, elevation);
            auto hit = scene.intersect(Ray{origin, direction, config.max_range});
            if (!hit) continue;

            Vec3 point = hit->point;
            LeafWood leaf_wood = hit->leaf_wood;
            Semantic semantic = hit->semantic;
            uint32_t instance = hit->instance;

            // Exact-zero draws skip the arithmetic below so zero-divergence
            // runs recreate the error-free output bit for bit.
            if (config.error_option == ErrorOption::CoordinateOffset) {
                auto [h_div, v_div] = divergence_at(config.divergence, hit->distance);
                KeyedRng rng(error_seed, tag_error, frame_index, column, beam);
                EllipseOffset offset = sample_ellipse_offset(rng, h_div, v_div);
                if (offset.a != 0.0 || offset.b != 0.0)
                    point = apply_coordinate_offset(point, offset, make_beam_frame(direction));
            } else if (config.error_option == ErrorOption::AngleOffset) {
                auto [h_div, v_div] = divergence_at(config.divergence, hit->distance);
                KeyedRng rng(error_seed, tag_error, frame_index, column, beam);
                auto [d_az, d_el] = perturb_angle(rng, hit->distance, h_div, v_div);
                if (d_az != 0.0 || d_el != 0.0) {
                    Vec3 perturbed = direction_from_angles(psi + d_az, elevation + d_el);
                    auto rehit = scene.intersect(Ray{origin, perturbed, config.max_range});
                    if (!rehit) continue;
                    point = rehit->point;
                    leaf_wood = rehit->leaf_wood;
                    semantic = rehit->semantic;
                    instance = rehit->instance;
                }
            }

            PointRecord record;
            record.frame = frame_index;
            record.t = frame_time;
            record.beam = static_cast<uint32_t>(beam);
            record.azimuth = azimuths_deg[column];
            record.abs = point;
            record.rel = rotate_z(point - origin, -carrier.yaw);
            record.leaf_wood = leaf_wood;
            record.semantic = semantic;
            record.instance = instance;
            records.push_back(record);

            ++stats.hits;
            ++stats.semantic_counts[static_cast<int>(semantic)];
            ++stats.leaf_wood_counts[static_cast<int>(leaf_wood)];
        }
    }
    return records;
}

} // namespace forestscan
