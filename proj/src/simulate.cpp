#include "forestscan/simulate.hpp"

#include <cmath>

#include "forestscan/motion.hpp"

namespace forestscan {

Scene build_scene(const RunConfig& config) {
    if (config.scene_file) return load_scene(*config.scene_file);
    return generate_forest(*config.scene_spec);
}

RunResult run_simulation(const RunConfig& config, const Scene& scene, int threads) {
    validate(config.sensor);
    PathSampler sampler(config.path, 128);

    const double fps = config.fps;
    const double path_duration = sampler.total_length() / sampler.walk_speed();
    uint64_t frame_count;
    if (config.full_path) {
        frame_count = static_cast<uint64_t>(std::floor(path_duration * fps + 1e-9)) + 1;
    } else {
        frame_count = static_cast<uint64_t>(std::floor(config.duration * fps + 1e-9));
    }

    RunResult result;

    // Poses and column schedule are sequential by nature; both are cheap and
    // precomputed here so the frame scan below can run in any order.
    std::vector<Pose> poses;
    poses.reserve(frame_count);
    for (uint64_t f = 0; f < frame_count; ++f) {
        double t = static_cast<double>(f) / fps;
        auto pose = pose_at(sampler, config.sway, t, 0.0);
        if (!pose) {
            result.totals.path_ended_early = true;
            break;
        }
        poses.push_back(*pose);
    }
    frame_count = poses.size();

    FrameSchedule schedule = make_schedule(config.sensor, fps);
    std::vector<std::vector<double>> azimuths(frame_count);
    for (uint64_t f = 0; f < frame_count; ++f) azimuths[f] = advance_schedule(schedule);

    const uint64_t error_seed = config.error_seed();
    std::vector<std::vector<PointRecord>> frame_records(frame_count);
    std::vector<ScanStats> frame_stats(frame_count);

    auto scan_one = [&](uint64_t f) {
        frame_records[f] =
            scan_frame(scene, poses[f], config.sensor, azimuths[f], static_cast<uint32_t>(f),
                       static_cast<double>(f) / fps, error_seed, frame_stats[f]);
    };

    if (threads <= 1) {
        for (uint64_t f = 0; f < frame_count; ++f) scan_one(f);
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int64_t f = 0; f < static_cast<int64_t>(frame_count); ++f)
            scan_one(static_cast<uint64_t>(f));
    }

    result.totals.frames = frame_count;
    result.totals.columns = schedule.columns_emitted;
    result.totals.rays_per_beam = schedule.columns_emitted;

    size_t total_records = 0;
    for (const auto& records : frame_records) total_records += records.size();
    result.records.reserve(total_records);
    result.trajectory.reserve(frame_count);

    ScanStats stats;
    for (uint64_t f = 0; f < frame_count; ++f) {
        stats += frame_stats[f];
        result.trajectory.push_back({static_cast<double>(f) / fps, poses[f]});
        result.records.insert(result.records.end(), frame_records[f].begin(),
                              frame_records[f].end());
    }
    result.totals.rays = stats.rays;
    result.totals.hits = stats.hits;
    for (int i = 0; i < 4; ++i) result.totals.semantic_counts[i] = stats.semantic_counts[i];
    for (int i = 0; i < 3; ++i) result.totals.leaf_wood_counts[i] = stats.leaf_wood_counts[i];
    return result;
}

} // namespace forestscan
