#pragma once

#include <string>
#include <vector>

#include "forestscan/errors.hpp"
#include "forestscan/motion.hpp"
#include "forestscan/point_record.hpp"
#include "forestscan/scene.hpp"

namespace forestscan {

enum class PointFormat { Csv, Ply };
enum class FrameMode { Relative, Absolute, Both };

// CSV columns: frame,t,beam,azimuth,x,y,z,leaf_wood,semantic,instance with
// x,y,z per frame_mode; Both inserts the absolute ax,ay,az after z. PLY is
// binary little-endian with the same fields as per-vertex properties and the
// label codes documented in header comments. Floats are written as shortest
// round-trip decimals (CSV) or raw bits (PLY), so write -> read is exact.
//
// Label codes are frozen: semantic Ground=0 Tree=1 Stone=2 Shrub=3;
// leaf_wood NotApplicable=0 Wood=1 Leaf=2.
void write_points(const std::vector<PointRecord>& records, const std::string& path,
                  PointFormat format, FrameMode frame_mode);

// Inverse of write_points; the format is sniffed from the file content.
// Single-frame-mode files fill both rel and abs with the stored coordinates.
// Malformed input raises IoError naming the line (CSV) or field (PLY).
std::vector<PointRecord> read_points(const std::string& path);

struct TrajectorySample {
    double t = 0.0;
    Pose pose;
};

// CSV t,x,y,z,yaw; rejects non-increasing timestamps.
void write_trajectory(const std::vector<TrajectorySample>& samples, const std::string& path);
std::vector<TrajectorySample> read_trajectory(const std::string& path);

// Versioned text format: primitive list plus instance table. Deterministic
// byte output (shortest round-trip decimals), so equal scenes hash equal.
void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double value);

} // namespace forestscan
