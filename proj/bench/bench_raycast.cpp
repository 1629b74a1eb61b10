// Compares the BVH caster against the serial brute-force reference on a
// randomized disc cloud, then reports serial vs OpenMP frame-scan times.
// Exits nonzero when the BVH fails to beat brute force by 10x per ray.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <vector>

#include "forestscan/raycast.hpp"
#include "forestscan/rng.hpp"
#include "forestscan/scene.hpp"
#include "forestscan/sensor.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace forestscan;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::vector<LabeledPrimitive> make_disc_cloud(size_t count, uint64_t seed) {
    std::vector<LabeledPrimitive> prims;
    prims.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        KeyedRng rng(seed, stream_tag("bench-disc"), i);
        Disc disc;
        disc.center = {rng.next_double(-50.0, 50.0), rng.next_double(-50.0, 50.0),
                       rng.next_double(0.0, 30.0)};
        double polar = std::acos(rng.next_double(-1.0, 1.0));
        double azim = rng.next_double(0.0, 2.0 * std::numbers::pi);
        disc.normal = {std::sin(polar) * std::cos(azim), std::sin(polar) * std::sin(azim),
                       std::cos(polar)};
        disc.radius = rng.next_double(0.03, 0.12);
        prims.push_back({disc, LeafWood::Leaf, Semantic::Tree, 0});
    }
    return prims;
}

Ray make_ray(uint64_t seed, size_t index) {
    KeyedRng rng(seed, stream_tag("bench-ray"), index);
    Ray ray;
    ray.origin = {rng.next_double(-60.0, 60.0), rng.next_double(-60.0, 60.0),
                  rng.next_double(0.0, 35.0)};
    double polar = std::acos(rng.next_double(-1.0, 1.0));
    double azim = rng.next_double(0.0, 2.0 * std::numbers::pi);
    ray.direction = {std::sin(polar) * std::cos(azim), std::sin(polar) * std::sin(azim),
                     std::cos(polar)};
    ray.t_max = 200.0;
    return ray;
}

SceneSpec bench_forest_spec() {
    TreeSpec pine;
    pine.species_name = "pine";
    pine.trunk_height = 12.0;
    pine.dbh = 0.3;
    pine.taper = 0.6;
    pine.canopy_radius = 2.5;
    pine.canopy_base_height = 5.0;
    pine.leaf_count = 400;
    pine.leaf_radius = 0.06;

    SceneSpec spec;
    spec.seed = 99;
    spec.extent = {40.0, 40.0};
    spec.tree_count_range = {12, 12};
    spec.species_mix = {{pine, 1.0}};
    spec.terrain_amplitude = 0.3;
    spec.terrain_cell = 2.5;
    return spec;
}

} // namespace

int main() {
    constexpr size_t disc_count = 100000;
    constexpr size_t bvh_rays = 10000;
    constexpr size_t brute_rays = 400; // brute force is O(rays x prims); keep it sampled
    constexpr uint64_t seed = 20240814;

    auto prims = make_disc_cloud(disc_count, seed);
    auto build_start = clock_type::now();
    Bvh bvh = Bvh::build(prims);
    double build_s = seconds_since(build_start);

    size_t bvh_hits = 0;
    double bvh_checksum = 0.0;
    auto bvh_start = clock_type::now();
    for (size_t i = 0; i < bvh_rays; ++i) {
        auto hit = bvh.intersect(make_ray(seed, i), prims);
        if (hit) {
            ++bvh_hits;
            bvh_checksum += hit->distance;
        }
    }
    double bvh_s = seconds_since(bvh_start);

    size_t brute_hits = 0;
    size_t mismatches = 0;
    auto brute_start = clock_type::now();
    for (size_t i = 0; i < brute_rays; ++i) {
        Ray ray = make_ray(seed, i);
        auto brute = intersect_brute(ray, prims);
        if (brute) ++brute_hits;
        auto fast = bvh.intersect(ray, prims);
        if (brute.has_value() != fast.has_value())
            ++mismatches;
        else if (brute && (brute->primitive_index != fast->primitive_index ||
                           std::abs(brute->distance - fast->distance) > 1e-9))
            ++mismatches;
    }
    double brute_s = seconds_since(brute_start);

    double bvh_per_ray = bvh_s / static_cast<double>(bvh_rays);
    double brute_per_ray = brute_s / static_cast<double>(brute_rays);
    double speedup = brute_per_ray / bvh_per_ray;

    std::printf("disc cloud: %zu primitives, BVH build %.3f s\n", disc_count, build_s);
    std::printf("bvh:   %6zu rays  %8.3f ms total  %8.3f us/ray  (%zu hits, checksum %.6f)\n",
                bvh_rays, bvh_s * 1e3, bvh_per_ray * 1e6, bvh_hits, bvh_checksum);
    std::printf("brute: %6zu rays  %8.3f ms total  %8.3f us/ray  (%zu hits)\n", brute_rays,
                brute_s * 1e3, brute_per_ray * 1e6, brute_hits);
    std::printf("speedup: %.1fx, oracle mismatches: %zu\n", speedup, mismatches);

    // Frame-scan kernel, serial loop vs the OpenMP schedule used by the
    // simulator. On a single-core host the two should be about equal.
    Scene scene = generate_forest(bench_forest_spec());
    SensorConfig sensor = preset(PresetName::Beams64);
    sensor.azimuth_resolution_deg = 1.0;

    constexpr int frame_count = 32;
    std::vector<std::vector<double>> frame_azimuths(frame_count);
    {
        FrameSchedule schedule = make_schedule(sensor, 30.0);
        for (int f = 0; f < frame_count; ++f) frame_azimuths[f] = advance_schedule(schedule);
    }
    Pose carrier{{0.0, 0.0, 0.0}, 0.0};

    std::vector<size_t> serial_counts(frame_count, 0);
    auto serial_start = clock_type::now();
    for (int f = 0; f < frame_count; ++f) {
        ScanStats stats;
        auto records = scan_frame(scene, carrier, sensor, frame_azimuths[f], f,
                                  f / 30.0, seed, stats);
        serial_counts[f] = records.size();
    }
    double serial_s = seconds_since(serial_start);

    std::vector<size_t> parallel_counts(frame_count, 0);
    auto parallel_start = clock_type::now();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int f = 0; f < frame_count; ++f) {
        ScanStats stats;
        auto records = scan_frame(scene, carrier, sensor, frame_azimuths[f], f,
                                  f / 30.0, seed, stats);
        parallel_counts[f] = records.size();
    }
    double parallel_s = seconds_since(parallel_start);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    size_t frame_mismatches = 0;
    for (int f = 0; f < frame_count; ++f)
        if (serial_counts[f] != parallel_counts[f]) ++frame_mismatches;

    std::printf("frame scan: %d frames of beams64 @ 1.0 deg\n", frame_count);
    std::printf("serial:   %8.3f ms\n", serial_s * 1e3);
    std::printf("openmp:   %8.3f ms  (%d threads, %zu count mismatches)\n", parallel_s * 1e3,
                threads, frame_mismatches);

    bool ok = speedup >= 10.0 && mismatches == 0 && frame_mismatches == 0;
    if (!ok) std::printf("FAIL: speedup %.1fx below 10x or mismatches present\n", speedup);
    return ok ? 0 : 1;
}
