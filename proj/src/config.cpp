#include "forestscan/config.hpp"

#include <fstream>

#include "forestscan/rng.hpp"

namespace forestscan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + ": missing field '" + key + "'");
    return *it;
}

double get_number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) fail(where + "." + key + ": expected a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_number(obj, key, where);
}

bool is_nonnegative_integer(const json& v) {
    if (v.is_number_unsigned()) return true;
    return v.is_number_integer() && v.get<int64_t>() >= 0;
}

uint64_t get_unsigned(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!is_nonnegative_integer(v)) fail(where + "." + key + ": expected a non-negative integer");
    return v.get<uint64_t>();
}

Vec3 parse_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        fail(where + ": expected [x, y, z]");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

TreeSpec parse_species(const json& s, const std::string& where) {
    TreeSpec spec;
    if (!s.is_object()) fail(where + ": expected an object");
    spec.species_name = require(s, "name", where).get<std::string>();
    spec.trunk_height = get_number(s, "trunk_height", where);
    spec.dbh = get_number(s, "dbh", where);
    spec.taper = get_number(s, "taper", where);
    spec.canopy_radius = get_number(s, "canopy_radius", where);
    spec.canopy_base_height = get_number(s, "canopy_base_height", where);
    spec.leaf_count = static_cast<uint32_t>(get_unsigned(s, "leaf_count", where));
    spec.leaf_radius = get_number(s, "leaf_radius", where);
    return spec;
}

SceneSpec parse_scene_spec(const json& s, uint64_t master_seed) {
    const std::string where = "scene";
    SceneSpec spec;
    spec.seed = s.contains("seed") ? get_unsigned(s, "seed", where)
                                   : derive_seed(master_seed, stream_tag("scene"));

    const json& extent = require(s, "extent", where);
    if (!extent.is_array() || extent.size() != 2) fail("scene.extent: expected [width, depth]");
    spec.extent = {extent[0].get<double>(), extent[1].get<double>()};

    const json& range = require(s, "tree_count_range", where);
    if (!range.is_array() || range.size() != 2 || !is_nonnegative_integer(range[0]) ||
        !is_nonnegative_integer(range[1]))
        fail("scene.tree_count_range: expected [min, max]");
    spec.tree_count_range = {range[0].get<uint32_t>(), range[1].get<uint32_t>()};

    spec.terrain_amplitude = get_number(s, "terrain_amplitude", where);
    spec.terrain_cell = get_number(s, "terrain_cell", where);
    spec.min_tree_spacing = get_number_or(s, "min_tree_spacing", where, spec.min_tree_spacing);

    const json& mix = require(s, "species", where);
    if (!mix.is_array() || mix.empty()) fail("scene.species: expected a non-empty array");
    for (size_t i = 0; i < mix.size(); ++i) {
        const std::string sw = "scene.species[" + std::to_string(i) + "]";
        TreeSpec tree = parse_species(mix[i], sw);
        double weight = get_number_or(mix[i], "weight", sw, 1.0);
        spec.species_mix.emplace_back(std::move(tree), weight);
    }

    try {
        validate(spec);
        for (const auto& [tree, weight] : spec.species_mix) {
            (void)weight;
            validate(tree);
        }
    } catch (const std::invalid_argument& e) {
        fail(std::string("scene: ") + e.what());
    }
    return spec;
}

ErrorOption parse_error_option(const std::string& name) {
    if (name == "none") return ErrorOption::None;
    if (name == "coordinate_offset") return ErrorOption::CoordinateOffset;
    if (name == "angle_offset") return ErrorOption::AngleOffset;
    fail("sensor.error_option: unknown option '" + name +
         "' (expected none, coordinate_offset, or angle_offset)");
}

SensorConfig parse_sensor(const json& s) {
    const std::string where = "sensor";
    SensorConfig config;
    bool have_preset = s.contains("preset");
    if (have_preset) {
        std::string label = require(s, "preset", where).get<std::string>();
        auto name = preset_from_label(label);
        if (!name) fail("sensor.preset: unknown preset '" + label + "'");
        config = preset(*name);
    }
    if (s.contains("vertical_angles")) {
        const json& angles = s["vertical_angles"];
        if (!angles.is_array() || angles.empty())
            fail("sensor.vertical_angles: expected a non-empty array");
        config.vertical_angles_deg.clear();
        for (const auto& a : angles) config.vertical_angles_deg.push_back(a.get<double>());
    } else if (!have_preset) {
        fail("sensor: need either 'preset' or 'vertical_angles'");
    }
    config.azimuth_resolution_deg =
        get_number_or(s, "azimuth_resolution", where, config.azimuth_resolution_deg);
    config.spin_rpm = get_number_or(s, "spin_rpm", where, config.spin_rpm);
    config.horizontal_fov_deg =
        get_number_or(s, "horizontal_fov", where, config.horizontal_fov_deg);
    config.max_range = get_number_or(s, "max_range", where, config.max_range);
    config.mount_height = get_number_or(s, "mount_height", where, config.mount_height);

    if (s.contains("error_option"))
        config.error_option = parse_error_option(s["error_option"].get<std::string>());

    if (s.contains("divergence")) {
        const json& table = s["divergence"];
        if (!table.is_array()) fail("sensor.divergence: expected an array of [distance, h, v]");
        config.divergence.segments.clear();
        for (const auto& row : table) {
            if (!row.is_array() || row.size() != 3)
                fail("sensor.divergence: each row must be [distance, h, v]");
            config.divergence.segments.push_back(
                {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
    } else if (!have_preset) {
        config.divergence = default_divergence_table(config.max_range);
    }

    try {
        validate(config);
    } catch (const std::invalid_argument& e) {
        fail(std::string("sensor: ") + e.what());
    }
    return config;
}

} // namespace

uint64_t RunConfig::error_seed() const { return derive_seed(master_seed, stream_tag("error")); }

RunConfig parse_run_config(const json& root) {
    if (!root.is_object()) fail("config root must be a JSON object");

    uint64_t version = get_unsigned(root, "schema_version", "config");
    if (version != static_cast<uint64_t>(config_schema_version))
        fail("config.schema_version: expected " + std::to_string(config_schema_version) +
             ", got " + std::to_string(version));

    RunConfig config;
    config.master_seed = root.contains("master_seed") ? get_unsigned(root, "master_seed", "config") : 0;

    const json& scene = require(root, "scene", "config");
    if (!scene.is_object()) fail("config.scene: expected an object");
    if (scene.contains("path")) {
        config.scene_file = scene["path"].get<std::string>();
    } else {
        config.scene_spec = parse_scene_spec(scene, config.master_seed);
    }

    config.sensor = parse_sensor(require(root, "sensor", "config"));

    const json& path = require(root, "path", "config");
    const json& points = require(path, "control_points", "config.path");
    if (!points.is_array() || points.size() < 2)
        fail("config.path.control_points: need at least 2 points");
    for (size_t i = 0; i < points.size(); ++i)
        config.path.control_points.push_back(
            parse_vec3(points[i], "config.path.control_points[" + std::to_string(i) + "]"));
    config.path.walk_speed = get_number(path, "walk_speed", "config.path");
    if (!(config.path.walk_speed > 0.0)) fail("config.path.walk_speed: must be positive");
    for (size_t i = 1; i < config.path.control_points.size(); ++i)
        if (config.path.control_points[i] == config.path.control_points[i - 1])
            fail("config.path.control_points: consecutive points must be distinct");

    if (root.contains("sway")) {
        const json& sway = root["sway"];
        const std::string where = "config.sway";
        config.sway.amp_vertical = get_number_or(sway, "amp_vertical", where, 0.0);
        config.sway.freq_vertical = get_number_or(sway, "freq_vertical", where, 0.0);
        config.sway.phase_vertical = get_number_or(sway, "phase_vertical", where, 0.0);
        config.sway.amp_lateral = get_number_or(sway, "amp_lateral", where, 0.0);
        config.sway.freq_lateral = get_number_or(sway, "freq_lateral", where, 0.0);
        config.sway.phase_lateral = get_number_or(sway, "phase_lateral", where, 0.0);
        if (config.sway.amp_vertical < 0.0 || config.sway.amp_lateral < 0.0 ||
            config.sway.freq_vertical < 0.0 || config.sway.freq_lateral < 0.0)
            fail("config.sway: amplitudes and frequencies must be non-negative");
    } else {
        config.sway = default_sway();
    }

    config.fps = get_number_or(root, "fps", "config", 30.0);
    if (!(config.fps > 0.0)) fail("config.fps: must be positive");

    const json& duration = require(root, "duration", "config");
    if (duration.is_string()) {
        if (duration.get<std::string>() != "full-path")
            fail("config.duration: expected a number of seconds or \"full-path\"");
        config.full_path = true;
    } else if (duration.is_number()) {
        config.duration = duration.get<double>();
        if (!(config.duration > 0.0)) fail("config.duration: must be positive");
    } else {
        fail("config.duration: expected a number of seconds or \"full-path\"");
    }

    if (root.contains("output")) {
        const json& output = root["output"];
        if (output.contains("directory"))
            config.output.directory = output["directory"].get<std::string>();
        if (output.contains("formats")) {
            config.output.formats.clear();
            for (const auto& f : output["formats"]) {
                std::string name = f.get<std::string>();
                if (name == "csv") config.output.formats.push_back(PointFormat::Csv);
                else if (name == "ply") config.output.formats.push_back(PointFormat::Ply);
                else fail("config.output.formats: unknown format '" + name + "'");
            }
            if (config.output.formats.empty()) fail("config.output.formats: need at least one");
        }
        if (output.contains("frame_mode")) {
            std::string mode = output["frame_mode"].get<std::string>();
            if (mode == "relative") config.output.frame_mode = FrameMode::Relative;
            else if (mode == "absolute") config.output.frame_mode = FrameMode::Absolute;
            else if (mode == "both") config.output.frame_mode = FrameMode::Both;
            else fail("config.output.frame_mode: expected relative, absolute, or both");
        }
    }
    return config;
}

RunConfig load_run_config(const std::string& path, json* raw) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (raw) *raw = root;
    return parse_run_config(root);
}

} // namespace forestscan
