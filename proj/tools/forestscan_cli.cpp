#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "forestscan/config.hpp"
#include "forestscan/errors.hpp"
#include "forestscan/io.hpp"
#include "forestscan/metrics.hpp"
#include "forestscan/sensor.hpp"
#include "forestscan/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace forestscan;

namespace {

// Precedence: --out-dir flag, then FORESTSCAN_OUTPUT_DIR, then the config.
std::string resolve_output_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("FORESTSCAN_OUTPUT_DIR"); env && *env) return env;
    return config_value;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string vec3_text(const Vec3& v) {
    return "(" + format_double(v.x) + ", " + format_double(v.y) + ", " + format_double(v.z) + ")";
}

const char* semantic_text(Semantic s) {
    switch (s) {
        case Semantic::Ground: return "ground";
        case Semantic::Tree: return "tree";
        case Semantic::Stone: return "stone";
        case Semantic::Shrub: return "shrub";
    }
    return "?";
}

int cmd_scene(const std::string& config_path, const std::string& out_flag,
              const std::string& out_file) {
    RunConfig config = load_run_config(config_path);
    std::string out_dir = resolve_output_dir(out_flag, config.output.directory);
    ensure_directory(out_dir);
    std::string scene_path = out_file.empty() ? (fs::path(out_dir) / "scene.txt").string()
                                              : out_file;

    Scene scene = build_scene(config);
    save_scene(scene, scene_path);

    size_t trees = 0;
    for (const auto& [id, info] : scene.instance_table)
        if (info.semantic == Semantic::Tree) ++trees;

    std::cout << "scene file: " << scene_path << "\n";
    std::cout << "trees: " << trees << "\n";
    std::cout << "primitives: " << scene.primitives.size() << "\n";
    if (scene.placement_gave_up)
        std::cout << "warning: placement gave up before reaching the requested tree count\n";
    std::cout << "instances:\n";
    for (const auto& [id, info] : scene.instance_table) {
        std::cout << "  " << id << " " << semantic_text(info.semantic);
        if (!info.species_name.empty()) std::cout << " " << info.species_name;
        std::cout << " root=" << vec3_text(info.root) << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_flag, int threads) {
    json raw;
    RunConfig config = load_run_config(config_path, &raw);
    std::string out_dir = resolve_output_dir(out_flag, config.output.directory);
    ensure_directory(out_dir);

    Scene scene = build_scene(config);
    RunResult result = run_simulation(config, scene, threads);

    json outputs = json::object();
    for (PointFormat format : config.output.formats) {
        const char* name = format == PointFormat::Csv ? "points.csv" : "points.ply";
        write_points(result.records, (fs::path(out_dir) / name).string(), format,
                     config.output.frame_mode);
        outputs[format == PointFormat::Csv ? "points_csv" : "points_ply"] = name;
    }
    write_trajectory(result.trajectory, (fs::path(out_dir) / "trajectory.csv").string());
    outputs["trajectory_csv"] = "trajectory.csv";

    const RunTotals& totals = result.totals;
    json manifest;
    manifest["schema_version"] = config_schema_version;
    manifest["config"] = raw;
    manifest["frames"] = totals.frames;
    manifest["columns"] = totals.columns;
    manifest["rays_cast"] = totals.rays;
    manifest["rays_per_beam"] = totals.rays_per_beam;
    manifest["beams"] = config.sensor.beam_count();
    manifest["hits"] = totals.hits;
    manifest["path_ended_early"] = totals.path_ended_early;
    manifest["semantic_counts"] = {{"ground", totals.semantic_counts[0]},
                                   {"tree", totals.semantic_counts[1]},
                                   {"stone", totals.semantic_counts[2]},
                                   {"shrub", totals.semantic_counts[3]}};
    manifest["leaf_wood_counts"] = {{"not_applicable", totals.leaf_wood_counts[0]},
                                    {"wood", totals.leaf_wood_counts[1]},
                                    {"leaf", totals.leaf_wood_counts[2]}};
    manifest["outputs"] = outputs;

    std::ofstream mout((fs::path(out_dir) / "manifest.json").string(),
                       std::ios::binary | std::ios::trunc);
    if (!mout) throw IoError("cannot write manifest in " + out_dir);
    mout << manifest.dump(2) << "\n";

    std::cout << "frames: " << totals.frames << "\n";
    std::cout << "columns: " << totals.columns << "\n";
    std::cout << "rays: " << totals.rays << "\n";
    std::cout << "hits: " << totals.hits << "\n";
    if (totals.path_ended_early) std::cout << "note: path ended before the requested duration\n";
    std::cout << "output directory: " << out_dir << "\n";
    return 0;
}

int cmd_metrics(const std::string& points_path, const std::string& points2_path,
                const std::vector<double>& region_values, uint32_t disks, double ratio,
                uint64_t seed, bool squared) {
    RegionOfInterest region{region_values[0], region_values[1], region_values[2],
                            region_values[3]};
    MetricsParams params{disks, ratio, seed};
    validate(region);
    validate(params);
    if (params_overcover(params))
        std::cerr << "warning: disks * ratio > 1, disks oversample the region\n";

    auto records = read_points(points_path);
    std::vector<Vec3> points;
    points.reserve(records.size());
    for (const auto& r : records) points.push_back(r.abs);

    std::cout << "InfraD=" << format_double(infra_d(points, region)) << "\n";
    std::cout << "InfraNUC=" << format_double(infra_nuc(points, region, params)) << "\n";

    if (!points2_path.empty()) {
        auto records2 = read_points(points2_path);
        std::vector<Vec3> points2;
        points2.reserve(records2.size());
        for (const auto& r : records2) points2.push_back(r.abs);
        std::cout << "Chamfer=" << format_double(chamfer(points, points2, squared)) << "\n";
    }
    return 0;
}

int cmd_presets() {
    std::cout << "preset beams azimuth_res_deg spin_rpm max_range_m mount_height_m "
                 "vertical_angles_deg\n";
    for (PresetName name : all_presets) {
        SensorConfig config = preset(name);
        std::cout << preset_label(name) << " " << config.beam_count() << " "
                  << format_double(config.azimuth_resolution_deg) << " "
                  << format_double(config.spin_rpm) << " " << format_double(config.max_range)
                  << " " << format_double(config.mount_height) << " ";
        for (size_t i = 0; i < config.vertical_angles_deg.size(); ++i) {
            if (i) std::cout << ",";
            std::cout << format_double(config.vertical_angles_deg[i]);
        }
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic forest LiDAR scan simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, scene_out;
    int threads = 1;

    auto* scene_cmd = app.add_subcommand("scene", "generate a forest scene and save it");
    scene_cmd->add_option("--config", config_path, "run config JSON")->required();
    scene_cmd->add_option("--out-dir", out_dir, "output directory override");
    scene_cmd->add_option("--out", scene_out, "scene file path (default <out-dir>/scene.txt)");

    auto* sim_cmd = app.add_subcommand("simulate", "run a scan and write point clouds");
    sim_cmd->add_option("--config", config_path, "run config JSON")->required();
    sim_cmd->add_option("--out-dir", out_dir, "output directory override");
    sim_cmd->add_option("--threads", threads, "OpenMP worker count")->check(CLI::PositiveNumber);

    std::string points_path, points2_path;
    std::vector<double> region_values;
    uint32_t disks = 20;
    double ratio = 0.05;
    uint64_t seed = 0;
    bool squared = false;

    auto* metrics_cmd = app.add_subcommand("metrics", "density/uniformity report over a point file");
    metrics_cmd->add_option("--points", points_path, "point file (csv or ply)")->required();
    metrics_cmd->add_option("--points2", points2_path, "second point file enables Chamfer");
    metrics_cmd->add_option("--region", region_values, "region of interest x0,y0,width,depth")
        ->required()
        ->expected(4)
        ->delimiter(',');
    metrics_cmd->add_option("--disks", disks, "number of sampling disks");
    metrics_cmd->add_option("--ratio", ratio, "disk area / region area");
    metrics_cmd->add_option("--seed", seed, "disk placement seed");
    metrics_cmd->add_flag("--squared", squared, "squared chamfer distances");

    auto* presets_cmd = app.add_subcommand("presets", "list the built-in sensor presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // bad invocation is a config error
    }

    try {
        if (scene_cmd->parsed()) return cmd_scene(config_path, out_dir, scene_out);
        if (sim_cmd->parsed()) return cmd_simulate(config_path, out_dir, threads);
        if (metrics_cmd->parsed())
            return cmd_metrics(points_path, points2_path, region_values, disks, ratio, seed,
                               squared);
        if (presets_cmd->parsed()) return cmd_presets();
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
