#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "forestscan/errors.hpp"
#include "forestscan/io.hpp"
#include "forestscan/motion.hpp"
#include "forestscan/scene.hpp"
#include "forestscan/sensor.hpp"

namespace forestscan {

inline constexpr int config_schema_version = 1;

struct OutputConfig {
    std::string directory = "out";
    std::vector<PointFormat> formats = {PointFormat::Csv};
    FrameMode frame_mode = FrameMode::Both;
};

// One archivable file describes a full run; the master seed fans out to
// per-module seeds through tagged streams, so e.g. the error seed can move
// without reshuffling the forest.
struct RunConfig {
    uint64_t master_seed = 0;
    std::optional<SceneSpec> scene_spec; // exactly one of these two is set
    std::optional<std::string> scene_file;
    SensorConfig sensor;
    ScanPath path;
    SwayConfig sway;
    double fps = 30.0;
    double duration = 0.0; // s; ignored when full_path
    bool full_path = false;
    OutputConfig output;

    uint64_t error_seed() const;
};

// Parse + validate; throws ConfigError with the offending field in the message.
RunConfig parse_run_config(const nlohmann::json& root);

// Reads the file, returning both the parsed config and the raw JSON for
// echoing into the run manifest. Throws IoError (unreadable) or ConfigError.
RunConfig load_run_config(const std::string& path, nlohmann::json* raw = nullptr);

} // namespace forestscan
