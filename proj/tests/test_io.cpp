#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "forestscan/io.hpp"
#include "forestscan/rng.hpp"
#include "forestscan/scene.hpp"

using namespace forestscan;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("forestscan-io-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::vector<PointRecord> sample_records() {
    std::vector<PointRecord> records;
    KeyedRng rng(1234, stream_tag("io-sample"));
    for (uint32_t i = 0; i < 50; ++i) {
        PointRecord r;
        r.frame = i / 7;
        r.t = r.frame / 30.0;
        r.beam = i % 16;
        r.azimuth = rng.next_double(0.0, 360.0);
        r.rel = {rng.next_double(-20, 20), rng.next_double(-20, 20), rng.next_double(-2, 30)};
        r.abs = r.rel + Vec3{100.0, -50.0, 1.25};
        r.leaf_wood = static_cast<LeafWood>(i % 3);
        r.semantic = static_cast<Semantic>(i % 4);
        r.instance = i % 5;
        records.push_back(r);
    }
    // Exercise exact-decimal corner cases.
    records[0].azimuth = 0.1 + 0.2; // 0.30000000000000004
    records[0].rel.x = -0.0;
    records[1].rel.y = 1e-300;
    records[2].abs.z = 12345678.90123456789;
    return records;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("format_double is shortest and exact") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_double(-2.5) == "-2.5");
    KeyedRng rng(5, stream_tag("io-fmt"));
    for (int i = 0; i < 1000; ++i) {
        double v = (rng.next_double() - 0.5) * std::pow(10.0, rng.next_double(-12, 12));
        double back = std::stod(format_double(v));
        CHECK(back == v);
    }
}

TEST_CASE("csv round-trips bit-exactly in every frame mode") {
    TempDir dir;
    auto records = sample_records();
    for (FrameMode mode : {FrameMode::Relative, FrameMode::Absolute, FrameMode::Both}) {
        std::string path = dir.file("points.csv");
        write_points(records, path, PointFormat::Csv, mode);
        auto loaded = read_points(path);
        REQUIRE(loaded.size() == records.size());
        for (size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            const auto& l = loaded[i];
            CHECK(l.frame == r.frame);
            CHECK(l.t == r.t);
            CHECK(l.beam == r.beam);
            CHECK(l.azimuth == r.azimuth);
            CHECK(l.leaf_wood == r.leaf_wood);
            CHECK(l.semantic == r.semantic);
            CHECK(l.instance == r.instance);
            if (mode == FrameMode::Relative) {
                CHECK(l.rel == r.rel);
                CHECK(l.abs == r.rel); // single-mode files fill both
            } else if (mode == FrameMode::Absolute) {
                CHECK(l.rel == r.abs);
                CHECK(l.abs == r.abs);
            } else {
                CHECK(l.rel == r.rel);
                CHECK(l.abs == r.abs);
            }
        }
    }
}

TEST_CASE("ply round-trips bit-exactly in every frame mode") {
    TempDir dir;
    auto records = sample_records();
    for (FrameMode mode : {FrameMode::Relative, FrameMode::Absolute, FrameMode::Both}) {
        std::string path = dir.file("points.ply");
        write_points(records, path, PointFormat::Ply, mode);
        auto loaded = read_points(path);
        REQUIRE(loaded.size() == records.size());
        for (size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            const auto& l = loaded[i];
            CHECK(l.frame == r.frame);
            CHECK(l.t == r.t);
            CHECK(l.beam == r.beam);
            CHECK(l.azimuth == r.azimuth);
            CHECK(l.leaf_wood == r.leaf_wood);
            CHECK(l.semantic == r.semantic);
            CHECK(l.instance == r.instance);
            if (mode == FrameMode::Both) {
                CHECK(l.rel == r.rel);
                CHECK(l.abs == r.abs);
            }
        }
    }
}

TEST_CASE("csv header strings are pinned") {
    TempDir dir;
    auto records = sample_records();

    write_points(records, dir.file("single.csv"), PointFormat::Csv, FrameMode::Relative);
    std::string single = slurp(dir.file("single.csv"));
    CHECK(single.rfind("frame,t,beam,azimuth,x,y,z,leaf_wood,semantic,instance\n", 0) == 0);

    write_points(records, dir.file("both.csv"), PointFormat::Csv, FrameMode::Both);
    std::string both = slurp(dir.file("both.csv"));
    CHECK(both.rfind("frame,t,beam,azimuth,x,y,z,ax,ay,az,leaf_wood,semantic,instance\n", 0) == 0);

    // Absolute mode shares the single-coordinate header.
    write_points(records, dir.file("abs.csv"), PointFormat::Csv, FrameMode::Absolute);
    std::string abs_file = slurp(dir.file("abs.csv"));
    CHECK(abs_file.rfind("frame,t,beam,azimuth,x,y,z,leaf_wood,semantic,instance\n", 0) == 0);
}

TEST_CASE("writes are byte-stable") {
    TempDir dir;
    auto records = sample_records();
    write_points(records, dir.file("a.csv"), PointFormat::Csv, FrameMode::Both);
    write_points(records, dir.file("b.csv"), PointFormat::Csv, FrameMode::Both);
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
    write_points(records, dir.file("a.ply"), PointFormat::Ply, FrameMode::Both);
    write_points(records, dir.file("b.ply"), PointFormat::Ply, FrameMode::Both);
    CHECK(slurp(dir.file("a.ply")) == slurp(dir.file("b.ply")));
}

TEST_CASE("empty record list gives a header-only csv that reads back empty") {
    TempDir dir;
    write_points({}, dir.file("empty.csv"), PointFormat::Csv, FrameMode::Both);
    CHECK(slurp(dir.file("empty.csv")) ==
          "frame,t,beam,azimuth,x,y,z,ax,ay,az,leaf_wood,semantic,instance\n");
    CHECK(read_points(dir.file("empty.csv")).empty());

    write_points({}, dir.file("empty.ply"), PointFormat::Ply, FrameMode::Relative);
    CHECK(read_points(dir.file("empty.ply")).empty());
}

TEST_CASE("malformed csv is rejected with the line number") {
    TempDir dir;
    std::string head = "frame,t,beam,azimuth,x,y,z,leaf_wood,semantic,instance\n";

    spit(dir.file("extra.csv"), head + "0,0,0,0,1,2,3,0,0,0,99\n");
    CHECK_THROWS_AS(read_points(dir.file("extra.csv")), IoError);

    spit(dir.file("short.csv"), head + "0,0,0,0,1,2,3,0,0\n");
    CHECK_THROWS_AS(read_points(dir.file("short.csv")), IoError);

    spit(dir.file("garbage.csv"), head + "0,0,0,0,1,x,3,0,0,0\n");
    CHECK_THROWS_AS(read_points(dir.file("garbage.csv")), IoError);

    spit(dir.file("badenum.csv"), head + "0,0,0,0,1,2,3,7,0,0\n");
    CHECK_THROWS_AS(read_points(dir.file("badenum.csv")), IoError);

    spit(dir.file("badhead.csv"), "frame,t,beam\n0,0,0\n");
    CHECK_THROWS_AS(read_points(dir.file("badhead.csv")), IoError);

    try {
        spit(dir.file("line3.csv"), head + "0,0,0,0,1,2,3,0,0,0\n0,0,0,0,1,2,3,0,0\n");
        read_points(dir.file("line3.csv"));
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    CHECK_THROWS_AS(read_points(dir.file("does-not-exist.csv")), IoError);
}

TEST_CASE("truncated ply payload is rejected") {
    TempDir dir;
    auto records = sample_records();
    write_points(records, dir.file("ok.ply"), PointFormat::Ply, FrameMode::Both);
    std::string bytes = slurp(dir.file("ok.ply"));
    spit(dir.file("cut.ply"), bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(read_points(dir.file("cut.ply")), IoError);
    spit(dir.file("pad.ply"), bytes + "xx");
    CHECK_THROWS_AS(read_points(dir.file("pad.ply")), IoError);
}

TEST_CASE("label codes in the ply header are frozen") {
    TempDir dir;
    write_points(sample_records(), dir.file("c.ply"), PointFormat::Ply, FrameMode::Relative);
    std::string bytes = slurp(dir.file("c.ply"));
    CHECK(bytes.rfind("ply\nformat binary_little_endian 1.0\n", 0) == 0);
    CHECK(bytes.find("comment leaf_wood codes: 0=not_applicable 1=wood 2=leaf\n") !=
          std::string::npos);
    CHECK(bytes.find("comment semantic codes: 0=ground 1=tree 2=stone 3=shrub\n") !=
          std::string::npos);
    CHECK(bytes.find("end_header\n") != std::string::npos);
}

TEST_CASE("frozen numeric label codes survive the csv encoding") {
    TempDir dir;
    std::vector<PointRecord> records(1);
    records[0].leaf_wood = LeafWood::Leaf;   // 2
    records[0].semantic = Semantic::Shrub;   // 3
    records[0].instance = 9;
    write_points(records, dir.file("codes.csv"), PointFormat::Csv, FrameMode::Relative);
    std::string line = slurp(dir.file("codes.csv"));
    CHECK(line.find(",2,3,9\n") != std::string::npos);
}

TEST_CASE("trajectory round-trips and is pinned to t,x,y,z,yaw") {
    TempDir dir;
    std::vector<TrajectorySample> samples;
    for (int i = 0; i < 20; ++i) {
        TrajectorySample s;
        s.t = i / 30.0;
        s.pose.position = {i * 0.04, std::sin(i * 0.1), 1.8 + 0.05 * std::sin(i)};
        s.pose.yaw = 0.01 * i;
        samples.push_back(s);
    }
    write_trajectory(samples, dir.file("trajectory.csv"));
    std::string text = slurp(dir.file("trajectory.csv"));
    CHECK(text.rfind("t,x,y,z,yaw\n", 0) == 0);

    auto loaded = read_trajectory(dir.file("trajectory.csv"));
    REQUIRE(loaded.size() == samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        CHECK(loaded[i].t == samples[i].t);
        CHECK(loaded[i].pose.position == samples[i].pose.position);
        CHECK(loaded[i].pose.yaw == samples[i].pose.yaw);
    }

    // Non-increasing timestamps are a programming error on write.
    auto bad = samples;
    bad[5].t = bad[4].t;
    CHECK_THROWS_AS(write_trajectory(bad, dir.file("bad.csv")), std::invalid_argument);
}

TEST_CASE("scene save/load round-trips to identical bytes") {
    TempDir dir;
    TreeSpec spec;
    spec.species_name = "pine";
    spec.trunk_height = 12.0;
    spec.dbh = 0.3;
    spec.taper = 0.5;
    spec.canopy_radius = 2.5;
    spec.canopy_base_height = 6.0;
    spec.leaf_count = 60;
    spec.leaf_radius = 0.08;

    SceneSpec scene_spec;
    scene_spec.seed = 99;
    scene_spec.extent = {20.0, 20.0};
    scene_spec.tree_count_range = {3, 3};
    scene_spec.species_mix = {{spec, 1.0}};
    scene_spec.terrain_amplitude = 0.6;
    scene_spec.terrain_cell = 2.5;

    Scene scene = generate_forest(scene_spec);
    save_scene(scene, dir.file("scene.txt"));
    Scene loaded = load_scene(dir.file("scene.txt"));

    REQUIRE(loaded.primitives.size() == scene.primitives.size());
    REQUIRE(loaded.instance_table.size() == scene.instance_table.size());
    for (const auto& [id, info] : scene.instance_table) {
        REQUIRE(loaded.instance_table.count(id) == 1);
        const auto& l = loaded.instance_table.at(id);
        CHECK(l.semantic == info.semantic);
        CHECK(l.species_name == info.species_name);
        CHECK(l.root == info.root);
    }
    CHECK(loaded.placement_gave_up == scene.placement_gave_up);

    // The loaded copy re-saves to the same bytes: fields survive exactly.
    save_scene(loaded, dir.file("scene2.txt"));
    CHECK(slurp(dir.file("scene.txt")) == slurp(dir.file("scene2.txt")));

    // The loaded scene answers ray queries like the original.
    auto h1 = scene.intersect({{0, 0, 30}, {0, 0, -1}, 100.0});
    auto h2 = loaded.intersect({{0, 0, 30}, {0, 0, -1}, 100.0});
    REQUIRE(h1.has_value());
    REQUIRE(h2.has_value());
    CHECK(h1->distance == h2->distance);
    CHECK(h1->primitive_index == h2->primitive_index);
}

TEST_CASE("scene loader rejects corrupted files") {
    TempDir dir;
    spit(dir.file("bad1.txt"), "not-a-scene 1\n");
    CHECK_THROWS_AS(load_scene(dir.file("bad1.txt")), IoError);
    spit(dir.file("bad2.txt"), "forestscan-scene 2\n");
    CHECK_THROWS_AS(load_scene(dir.file("bad2.txt")), IoError);
    spit(dir.file("bad3.txt"),
         "forestscan-scene 1\nplacement_gave_up 0\nprimitives 1\ntri 0 0 0 1 0 0\n");
    CHECK_THROWS_AS(load_scene(dir.file("bad3.txt")), IoError);
    CHECK_THROWS_AS(load_scene(dir.file("missing.txt")), IoError);
}

} // TEST_SUITE
