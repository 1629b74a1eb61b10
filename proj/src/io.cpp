#include "forestscan/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>

static_assert(std::endian::native == std::endian::little,
              "binary PLY output assumes a little-endian host");

namespace forestscan {

namespace {

constexpr std::string_view csv_header_single = "frame,t,beam,azimuth,x,y,z,leaf_wood,semantic,instance";
constexpr std::string_view csv_header_both = "frame,t,beam,azimuth,x,y,z,ax,ay,az,leaf_wood,semantic,instance";
constexpr std::string_view trajectory_header = "t,x,y,z,yaw";
constexpr std::string_view scene_magic = "forestscan-scene";
constexpr int scene_version = 1;

void append_double(std::string& out, double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

void append_unsigned(std::string& out, uint64_t value) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return std::move(buf).str();
}

[[noreturn]] void fail_line(const std::string& path, size_t line, const std::string& what) {
    throw IoError(path + " line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view field, const std::string& path, size_t line) {
    double value = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        fail_line(path, line, "bad number '" + std::string(field) + "'");
    return value;
}

uint64_t parse_unsigned(std::string_view field, const std::string& path, size_t line,
                        uint64_t max_value) {
    uint64_t value = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || value > max_value)
        fail_line(path, line, "bad integer '" + std::string(field) + "'");
    return value;
}

// Splits text into lines; strips one optional trailing '\r' per line.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    for (;;) {
        size_t end = line.find(sep, start);
        if (end == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
}

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

void append_record_csv(std::string& out, const PointRecord& r, FrameMode mode) {
    append_unsigned(out, r.frame);
    out.push_back(',');
    append_double(out, r.t);
    out.push_back(',');
    append_unsigned(out, r.beam);
    out.push_back(',');
    append_double(out, r.azimuth);
    const Vec3& first = mode == FrameMode::Absolute ? r.abs : r.rel;
    for (double v : {first.x, first.y, first.z}) {
        out.push_back(',');
        append_double(out, v);
    }
    if (mode == FrameMode::Both) {
        for (double v : {r.abs.x, r.abs.y, r.abs.z}) {
            out.push_back(',');
            append_double(out, v);
        }
    }
    out.push_back(',');
    append_unsigned(out, static_cast<uint64_t>(r.leaf_wood));
    out.push_back(',');
    append_unsigned(out, static_cast<uint64_t>(r.semantic));
    out.push_back(',');
    append_unsigned(out, r.instance);
    out.push_back('\n');
}

std::string points_to_csv(const std::vector<PointRecord>& records, FrameMode mode) {
    std::string out;
    out.reserve(64 + records.size() * 96);
    out.append(mode == FrameMode::Both ? csv_header_both : csv_header_single);
    out.push_back('\n');
    for (const auto& r : records) append_record_csv(out, r, mode);
    return out;
}

std::vector<PointRecord> points_from_csv(const std::string& text, const std::string& path) {
    auto lines = split_lines(text);
    if (lines.empty()) throw IoError(path + " line 1: missing header");

    FrameMode mode;
    if (lines[0] == csv_header_single)
        mode = FrameMode::Relative; // relative/absolute files are identical on disk
    else if (lines[0] == csv_header_both)
        mode = FrameMode::Both;
    else
        fail_line(path, 1, "unexpected header '" + std::string(lines[0]) + "'");

    const size_t expected = mode == FrameMode::Both ? 13 : 10;
    std::vector<PointRecord> records;
    records.reserve(lines.size() - 1);
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) fail_line(path, i + 1, "empty row");
        auto fields = split_fields(lines[i], ',');
        if (fields.size() != expected)
            fail_line(path, i + 1,
                      "expected " + std::to_string(expected) + " fields, got " +
                          std::to_string(fields.size()));
        PointRecord r;
        size_t f = 0;
        r.frame = static_cast<uint32_t>(parse_unsigned(fields[f++], path, i + 1, UINT32_MAX));
        r.t = parse_double(fields[f++], path, i + 1);
        r.beam = static_cast<uint32_t>(parse_unsigned(fields[f++], path, i + 1, UINT32_MAX));
        r.azimuth = parse_double(fields[f++], path, i + 1);
        r.rel.x = parse_double(fields[f++], path, i + 1);
        r.rel.y = parse_double(fields[f++], path, i + 1);
        r.rel.z = parse_double(fields[f++], path, i + 1);
        if (mode == FrameMode::Both) {
            r.abs.x = parse_double(fields[f++], path, i + 1);
            r.abs.y = parse_double(fields[f++], path, i + 1);
            r.abs.z = parse_double(fields[f++], path, i + 1);
        } else {
            r.abs = r.rel;
        }
        r.leaf_wood = static_cast<LeafWood>(parse_unsigned(fields[f++], path, i + 1, 2));
        r.semantic = static_cast<Semantic>(parse_unsigned(fields[f++], path, i + 1, 3));
        r.instance = static_cast<uint32_t>(parse_unsigned(fields[f++], path, i + 1, UINT32_MAX));
        records.push_back(r);
    }
    return records;
}

template <typename T>
void append_raw(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

size_t ply_record_size(FrameMode mode) {
    return 4 + 8 + 4 + 8 + 24 + (mode == FrameMode::Both ? 24 : 0) + 1 + 1 + 4;
}

std::string points_to_ply(const std::vector<PointRecord>& records, FrameMode mode) {
    std::string out;
    out.reserve(512 + records.size() * ply_record_size(mode));
    out.append("ply\nformat binary_little_endian 1.0\n");
    out.append("comment leaf_wood codes: 0=not_applicable 1=wood 2=leaf\n");
    out.append("comment semantic codes: 0=ground 1=tree 2=stone 3=shrub\n");
    out.append("element vertex ");
    append_unsigned(out, records.size());
    out.push_back('\n');
    out.append("property uint frame\nproperty double t\nproperty uint beam\nproperty double azimuth\n");
    out.append("property double x\nproperty double y\nproperty double z\n");
    if (mode == FrameMode::Both)
        out.append("property double ax\nproperty double ay\nproperty double az\n");
    out.append("property uchar leaf_wood\nproperty uchar semantic\nproperty uint instance\n");
    out.append("end_header\n");

    for (const auto& r : records) {
        append_raw(out, r.frame);
        append_raw(out, r.t);
        append_raw(out, r.beam);
        append_raw(out, r.azimuth);
        const Vec3& first = mode == FrameMode::Absolute ? r.abs : r.rel;
        append_raw(out, first.x);
        append_raw(out, first.y);
        append_raw(out, first.z);
        if (mode == FrameMode::Both) {
            append_raw(out, r.abs.x);
            append_raw(out, r.abs.y);
            append_raw(out, r.abs.z);
        }
        append_raw(out, static_cast<uint8_t>(r.leaf_wood));
        append_raw(out, static_cast<uint8_t>(r.semantic));
        append_raw(out, r.instance);
    }
    return out;
}

template <typename T>
T read_raw(const std::string& text, size_t& offset) {
    T value;
    std::memcpy(&value, text.data() + offset, sizeof(T));
    offset += sizeof(T);
    return value;
}

std::vector<PointRecord> points_from_ply(const std::string& text, const std::string& path) {
    size_t header_end = text.find("end_header\n");
    if (header_end == std::string::npos) throw IoError(path + ": missing end_header");
    size_t payload_start = header_end + std::strlen("end_header\n");

    auto lines = split_lines(std::string_view(text).substr(0, header_end));
    size_t li = 0;
    auto next_line = [&]() -> std::string_view {
        while (li < lines.size() && lines[li].substr(0, 7) == "comment") ++li;
        if (li >= lines.size()) throw IoError(path + ": truncated ply header");
        return lines[li++];
    };

    if (next_line() != "ply") throw IoError(path + ": not a ply file");
    if (next_line() != "format binary_little_endian 1.0")
        throw IoError(path + ": unsupported ply format");

    auto element = next_line();
    auto tokens = split_tokens(element);
    if (tokens.size() != 3 || tokens[0] != "element" || tokens[1] != "vertex")
        throw IoError(path + ": expected 'element vertex <count>'");
    uint64_t count = parse_unsigned(tokens[2], path, li, UINT64_MAX);

    std::vector<std::string> properties;
    while (li < lines.size()) {
        auto line = next_line();
        auto p = split_tokens(line);
        if (p.size() != 3 || p[0] != "property")
            throw IoError(path + ": unexpected header line '" + std::string(line) + "'");
        properties.push_back(std::string(p[1]) + " " + std::string(p[2]));
    }

    const std::vector<std::string> head = {"uint frame", "double t", "uint beam",
                                           "double azimuth", "double x", "double y", "double z"};
    const std::vector<std::string> abs_block = {"double ax", "double ay", "double az"};
    const std::vector<std::string> tail = {"uchar leaf_wood", "uchar semantic", "uint instance"};

    auto matches = [&](bool with_abs) {
        std::vector<std::string> want = head;
        if (with_abs) want.insert(want.end(), abs_block.begin(), abs_block.end());
        want.insert(want.end(), tail.begin(), tail.end());
        return properties == want;
    };

    FrameMode mode;
    if (matches(false))
        mode = FrameMode::Relative;
    else if (matches(true))
        mode = FrameMode::Both;
    else
        throw IoError(path + ": unexpected ply property layout");

    size_t record_size = ply_record_size(mode);
    if (text.size() - payload_start != count * record_size)
        throw IoError(path + ": payload size mismatch (expected " +
                      std::to_string(count * record_size) + " bytes, got " +
                      std::to_string(text.size() - payload_start) + ")");

    std::vector<PointRecord> records;
    records.reserve(count);
    size_t offset = payload_start;
    for (uint64_t i = 0; i < count; ++i) {
        PointRecord r;
        r.frame = read_raw<uint32_t>(text, offset);
        r.t = read_raw<double>(text, offset);
        r.beam = read_raw<uint32_t>(text, offset);
        r.azimuth = read_raw<double>(text, offset);
        r.rel.x = read_raw<double>(text, offset);
        r.rel.y = read_raw<double>(text, offset);
        r.rel.z = read_raw<double>(text, offset);
        if (mode == FrameMode::Both) {
            r.abs.x = read_raw<double>(text, offset);
            r.abs.y = read_raw<double>(text, offset);
            r.abs.z = read_raw<double>(text, offset);
        } else {
            r.abs = r.rel;
        }
        uint8_t lw = read_raw<uint8_t>(text, offset);
        uint8_t sem = read_raw<uint8_t>(text, offset);
        if (lw > 2) throw IoError(path + ": record " + std::to_string(i) + ": bad leaf_wood code");
        if (sem > 3) throw IoError(path + ": record " + std::to_string(i) + ": bad semantic code");
        r.leaf_wood = static_cast<LeafWood>(lw);
        r.semantic = static_cast<Semantic>(sem);
        r.instance = read_raw<uint32_t>(text, offset);
        records.push_back(r);
    }
    return records;
}

} // namespace

std::string format_double(double value) {
    std::string out;
    append_double(out, value);
    return out;
}

void write_points(const std::vector<PointRecord>& records, const std::string& path,
                  PointFormat format, FrameMode frame_mode) {
    std::string data = format == PointFormat::Csv ? points_to_csv(records, frame_mode)
                                                  : points_to_ply(records, frame_mode);
    write_file(path, data);
}

std::vector<PointRecord> read_points(const std::string& path) {
    std::string text = read_file(path);
    if (text.substr(0, 4) == "ply\n") return points_from_ply(text, path);
    return points_from_csv(text, path);
}

void write_trajectory(const std::vector<TrajectorySample>& samples, const std::string& path) {
    std::string out;
    out.append(trajectory_header);
    out.push_back('\n');
    for (size_t i = 0; i < samples.size(); ++i) {
        if (i > 0 && !(samples[i].t > samples[i - 1].t))
            throw std::invalid_argument("trajectory timestamps must be strictly increasing");
        append_double(out, samples[i].t);
        for (double v : {samples[i].pose.position.x, samples[i].pose.position.y,
                         samples[i].pose.position.z, samples[i].pose.yaw}) {
            out.push_back(',');
            append_double(out, v);
        }
        out.push_back('\n');
    }
    write_file(path, out);
}

std::vector<TrajectorySample> read_trajectory(const std::string& path) {
    std::string text = read_file(path);
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != trajectory_header)
        throw IoError(path + " line 1: expected header '" + std::string(trajectory_header) + "'");
    std::vector<TrajectorySample> samples;
    for (size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_fields(lines[i], ',');
        if (fields.size() != 5)
            fail_line(path, i + 1, "expected 5 fields, got " + std::to_string(fields.size()));
        TrajectorySample s;
        s.t = parse_double(fields[0], path, i + 1);
        s.pose.position.x = parse_double(fields[1], path, i + 1);
        s.pose.position.y = parse_double(fields[2], path, i + 1);
        s.pose.position.z = parse_double(fields[3], path, i + 1);
        s.pose.yaw = parse_double(fields[4], path, i + 1);
        samples.push_back(s);
    }
    return samples;
}

void save_scene(const Scene& scene, const std::string& path) {
    std::string out;
    out.append(scene_magic);
    out.push_back(' ');
    append_unsigned(out, scene_version);
    out.push_back('\n');
    out.append("placement_gave_up ");
    append_unsigned(out, scene.placement_gave_up ? 1 : 0);
    out.push_back('\n');

    out.append("primitives ");
    append_unsigned(out, scene.primitives.size());
    out.push_back('\n');
    for (const auto& prim : scene.primitives) {
        std::vector<double> values;
        if (const auto* tri = std::get_if<Triangle>(&prim.geometry)) {
            out.append("tri");
            values = {tri->a.x, tri->a.y, tri->a.z, tri->b.x, tri->b.y,
                      tri->b.z, tri->c.x, tri->c.y, tri->c.z};
        } else if (const auto* cone = std::get_if<TruncatedCone>(&prim.geometry)) {
            out.append("cone");
            values = {cone->base_center.x, cone->base_center.y, cone->base_center.z,
                      cone->axis.x,        cone->axis.y,        cone->axis.z,
                      cone->base_radius,   cone->top_radius};
        } else {
            const auto& disc = std::get<Disc>(prim.geometry);
            out.append("disc");
            values = {disc.center.x, disc.center.y, disc.center.z, disc.normal.x,
                      disc.normal.y, disc.normal.z, disc.radius};
        }
        for (double v : values) {
            out.push_back(' ');
            append_double(out, v);
        }
        out.push_back(' ');
        append_unsigned(out, static_cast<uint64_t>(prim.leaf_wood));
        out.push_back(' ');
        append_unsigned(out, static_cast<uint64_t>(prim.semantic));
        out.push_back(' ');
        append_unsigned(out, prim.instance);
        out.push_back('\n');
    }

    out.append("instances ");
    append_unsigned(out, scene.instance_table.size());
    out.push_back('\n');
    for (const auto& [id, info] : scene.instance_table) {
        out.append("inst ");
        append_unsigned(out, id);
        out.push_back(' ');
        append_unsigned(out, static_cast<uint64_t>(info.semantic));
        for (double v : {info.root.x, info.root.y, info.root.z}) {
            out.push_back(' ');
            append_double(out, v);
        }
        if (!info.species_name.empty()) {
            out.push_back(' ');
            out.append(info.species_name);
        }
        out.push_back('\n');
    }
    write_file(path, out);
}

Scene load_scene(const std::string& path) {
    std::string text = read_file(path);
    auto lines = split_lines(text);
    size_t li = 0;
    auto need_line = [&]() -> std::string_view {
        if (li >= lines.size()) throw IoError(path + ": truncated scene file");
        return lines[li++];
    };

    auto header = split_tokens(need_line());
    if (header.size() != 2 || header[0] != scene_magic)
        throw IoError(path + " line 1: not a scene file");
    if (parse_unsigned(header[1], path, 1, UINT64_MAX) != scene_version)
        throw IoError(path + " line 1: unsupported scene version");

    Scene scene;

    auto flag = split_tokens(need_line());
    if (flag.size() != 2 || flag[0] != "placement_gave_up")
        fail_line(path, li, "expected placement_gave_up");
    scene.placement_gave_up = parse_unsigned(flag[1], path, li, 1) != 0;

    auto prim_header = split_tokens(need_line());
    if (prim_header.size() != 2 || prim_header[0] != "primitives")
        fail_line(path, li, "expected primitives count");
    uint64_t prim_count = parse_unsigned(prim_header[1], path, li, UINT64_MAX);

    scene.primitives.reserve(prim_count);
    for (uint64_t i = 0; i < prim_count; ++i) {
        size_t line_no = li + 1;
        auto tokens = split_tokens(need_line());
        if (tokens.empty()) fail_line(path, line_no, "empty primitive row");
        std::string_view kind = tokens[0];
        size_t doubles = kind == "tri" ? 9 : kind == "cone" ? 8 : kind == "disc" ? 7 : 0;
        if (doubles == 0) fail_line(path, line_no, "unknown primitive '" + std::string(kind) + "'");
        if (tokens.size() != 1 + doubles + 3)
            fail_line(path, line_no, "wrong field count for " + std::string(kind));

        double v[9];
        for (size_t k = 0; k < doubles; ++k) v[k] = parse_double(tokens[1 + k], path, line_no);

        LabeledPrimitive prim;
        if (kind == "tri")
            prim.geometry = Triangle{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]}};
        else if (kind == "cone")
            prim.geometry = TruncatedCone{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6], v[7]};
        else
            prim.geometry = Disc{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6]};
        prim.leaf_wood = static_cast<LeafWood>(parse_unsigned(tokens[1 + doubles], path, line_no, 2));
        prim.semantic =
            static_cast<Semantic>(parse_unsigned(tokens[2 + doubles], path, line_no, 3));
        prim.instance =
            static_cast<uint32_t>(parse_unsigned(tokens[3 + doubles], path, line_no, UINT32_MAX));
        scene.primitives.push_back(prim);
    }

    auto inst_header = split_tokens(need_line());
    if (inst_header.size() != 2 || inst_header[0] != "instances")
        fail_line(path, li, "expected instances count");
    uint64_t inst_count = parse_unsigned(inst_header[1], path, li, UINT64_MAX);

    for (uint64_t i = 0; i < inst_count; ++i) {
        size_t line_no = li + 1;
        std::string_view line = need_line();
        auto tokens = split_tokens(line);
        if (tokens.size() < 6 || tokens[0] != "inst")
            fail_line(path, line_no, "bad instance row");
        auto id = static_cast<uint32_t>(parse_unsigned(tokens[1], path, line_no, UINT32_MAX));
        InstanceInfo info;
        info.semantic = static_cast<Semantic>(parse_unsigned(tokens[2], path, line_no, 3));
        info.root.x = parse_double(tokens[3], path, line_no);
        info.root.y = parse_double(tokens[4], path, line_no);
        info.root.z = parse_double(tokens[5], path, line_no);
        if (tokens.size() > 6) {
            // Species is the remainder of the line (names may contain spaces).
            size_t name_pos = tokens[6].data() - line.data();
            info.species_name = std::string(line.substr(name_pos));
        }
        scene.instance_table[id] = info;
    }

    finalize_scene(scene);
    return scene;
}

} // namespace forestscan
