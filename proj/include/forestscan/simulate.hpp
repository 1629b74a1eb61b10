#pragma once

#include <cstdint>
#include <vector>

#include "forestscan/config.hpp"
#include "forestscan/io.hpp"
#include "forestscan/scene.hpp"
#include "forestscan/sensor.hpp"

namespace forestscan {

struct RunTotals {
    uint64_t frames = 0;
    uint64_t columns = 0;       // azimuth columns over the whole run
    uint64_t rays = 0;          // columns x beams
    uint64_t rays_per_beam = 0; // == columns (every beam fires each column)
    uint64_t hits = 0;
    uint64_t semantic_counts[4] = {0, 0, 0, 0};
    uint64_t leaf_wood_counts[3] = {0, 0, 0};
    bool path_ended_early = false;
};

struct RunResult {
    std::vector<PointRecord> records;        // frame order
    std::vector<TrajectorySample> trajectory; // one carrier pose per frame
    RunTotals totals;
};

// Generates the scene from the config, or loads it from the referenced file.
Scene build_scene(const RunConfig& config);

// Runs the whole scan. Frames are scheduled serially, then scanned with
// `threads` OpenMP workers (1 = plain serial loop) and assembled in frame
// order; every random draw is keyed by (frame, column, beam), so the output
// is byte-identical for any thread count.
RunResult run_simulation(const RunConfig& config, const Scene& scene, int threads = 1);

} // namespace forestscan
