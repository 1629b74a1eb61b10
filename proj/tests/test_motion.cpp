#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "forestscan/motion.hpp"

using namespace forestscan;

namespace {

ScanPath wiggle_path() {
    ScanPath path;
    path.control_points = {{0, 0, 0}, {3, 1, 0}, {6, -1, 0.5}, {9, 0, 0}, {12, 2, 0}};
    path.walk_speed = 1.2;
    return path;
}

} // namespace

TEST_SUITE("motion") {

TEST_CASE("two-point segment has length 10 and hits both endpoints") {
    ScanPath path{{{0, 0, 0}, {10, 0, 0}}, 1.0};
    PathSampler sampler(path);
    CHECK(sampler.total_length() == doctest::Approx(10.0).epsilon(1e-9));
    Vec3 a = sampler.point_at(0.0);
    Vec3 b = sampler.point_at(sampler.total_length());
    CHECK(std::abs(a.x) <= 1e-9);
    CHECK(b.x == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(a.y == 0.0);
    CHECK(std::abs(b.y) <= 1e-9);
}

TEST_CASE("spline interpolates every control point") {
    PathSampler sampler(wiggle_path());
    auto cp = wiggle_path().control_points;
    REQUIRE(sampler.segment_count() == static_cast<int>(cp.size()) - 1);
    for (int seg = 0; seg < sampler.segment_count(); ++seg) {
        Vec3 start = sampler.eval_segment(seg, 0.0);
        Vec3 end = sampler.eval_segment(seg, 1.0);
        CHECK(norm(start - cp[seg]) <= 1e-9);
        CHECK(norm(end - cp[seg + 1]) <= 1e-9);
    }
}

TEST_CASE("arc-length table converges: doubling samples moves length < 0.1%") {
    PathSampler coarse(wiggle_path(), 128);
    PathSampler fine(wiggle_path(), 256);
    double rel = std::abs(fine.total_length() - coarse.total_length()) / fine.total_length();
    CHECK(rel < 1e-3);
}

TEST_CASE("arc-length parameterization gives constant speed within 1%") {
    PathSampler sampler(wiggle_path());
    const int steps = 400;
    double ds = sampler.total_length() / steps;
    Vec3 prev = sampler.point_at(0.0);
    for (int k = 1; k <= steps; ++k) {
        Vec3 next = sampler.point_at(k * ds);
        double chord = norm(next - prev);
        CHECK(chord == doctest::Approx(ds).epsilon(0.01));
        prev = next;
    }
}

TEST_CASE("tangent is unit length and follows the path direction") {
    PathSampler sampler(wiggle_path());
    const int steps = 50;
    for (int k = 0; k <= steps; ++k) {
        double s = sampler.total_length() * k / steps;
        Vec3 t = sampler.tangent_at(s);
        CHECK(norm(t) == doctest::Approx(1.0).epsilon(1e-9));
    }
    // Forward difference agrees with the tangent away from the endpoints.
    double s = sampler.total_length() * 0.37;
    Vec3 fd = normalized(sampler.point_at(s + 1e-4) - sampler.point_at(s - 1e-4));
    Vec3 t = sampler.tangent_at(s);
    CHECK(dot(fd, t) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("path validation") {
    CHECK_THROWS_AS(PathSampler(ScanPath{{{0, 0, 0}}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PathSampler(ScanPath{{{0, 0, 0}, {0, 0, 0}}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PathSampler(ScanPath{{{0, 0, 0}, {1, 0, 0}}, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(PathSampler(ScanPath{{{0, 0, 0}, {1, 0, 0}}, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(PathSampler(ScanPath{{{0, 0, 0}, {1, 0, 0}}, 1.0}, 4), std::invalid_argument);
}

TEST_CASE("sway closed forms") {
    SwayConfig config{0.05, 2.0, 0.0, 0.04, 1.0, 0.0};
    // 2*pi*2*t = pi/2 at t = 1/8.
    auto [dz, dlat] = sway(config, 0.125);
    CHECK(dz == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(dlat == doctest::Approx(0.04 * std::sin(pi / 4.0)).epsilon(1e-12));

    auto [dz0, dlat0] = sway(config, 0.0);
    CHECK(dz0 == 0.0);
    CHECK(dlat0 == 0.0);

    // Half the vertical period later the bounce is inverted.
    auto [dz_half, dlat_half] = sway(config, 0.125 + 0.25);
    CHECK(dz_half == doctest::Approx(-0.05).epsilon(1e-12));
    (void)dlat_half;

    // Phase shifts move the argument.
    SwayConfig shifted = config;
    shifted.phase_vertical = pi / 2.0;
    CHECK(sway(shifted, 0.0).first == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("sway components superpose independently") {
    SwayConfig both{0.05, 2.0, 0.3, 0.04, 1.0, 1.1};
    SwayConfig vertical_only = both;
    vertical_only.amp_lateral = 0.0;
    SwayConfig lateral_only = both;
    lateral_only.amp_vertical = 0.0;
    for (double t : {0.0, 0.1, 0.31, 1.7, 9.99}) {
        CHECK(sway(both, t).first == sway(vertical_only, t).first);
        CHECK(sway(both, t).second == sway(lateral_only, t).second);
    }
}

TEST_CASE("vertical bounce peaks at the amplitude") {
    SwayConfig config{0.05, 2.0, 0.0, 0.0, 0.0, 0.0};
    double max_dz = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        double t = 10.0 * i / 10000.0;
        max_dz = std::max(max_dz, std::abs(sway(config, t).first));
    }
    CHECK(max_dz <= 0.05);
    CHECK(max_dz >= 0.0499);
}

TEST_CASE("zero sway keeps the pose on the spline") {
    PathSampler sampler(wiggle_path());
    SwayConfig none{};
    for (double t : {0.0, 0.5, 1.25, 3.0, 7.75}) {
        auto pose = pose_at(sampler, none, t, 0.0);
        REQUIRE(pose.has_value());
        Vec3 expected = sampler.point_at(sampler.walk_speed() * t);
        CHECK(norm(pose->position - expected) <= 1e-12);
    }
}

TEST_CASE("lateral sway stays on the left-right axis of a straight walk") {
    ScanPath path{{{0, 0, 0}, {20, 0, 0}}, 1.0};
    PathSampler sampler(path);
    SwayConfig config{0.0, 0.0, 0.0, 0.1, 1.0, 0.0};
    double max_y = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double t = 2.0 * i / 2000.0;
        auto pose = pose_at(sampler, config, t, 0.0);
        REQUIRE(pose.has_value());
        CHECK(std::abs(pose->position.y) <= 0.1 + 1e-12);
        CHECK(std::abs(pose->position.z) <= 1e-12);
        max_y = std::max(max_y, std::abs(pose->position.y));
    }
    CHECK(max_y >= 0.0999);
}

TEST_CASE("yaw follows the walking direction") {
    PathSampler east(ScanPath{{{0, 0, 0}, {5, 0, 0}}, 1.0});
    PathSampler north(ScanPath{{{0, 0, 0}, {0, 5, 0}}, 1.0});
    PathSampler diagonal(ScanPath{{{0, 0, 0}, {5, 5, 0}}, 1.0});
    SwayConfig none{};
    CHECK(std::abs(pose_at(east, none, 1.0, 0.0)->yaw) <= 1e-9);
    CHECK(pose_at(north, none, 1.0, 0.0)->yaw == doctest::Approx(pi / 2).epsilon(1e-9));
    CHECK(pose_at(diagonal, none, 1.0, 0.0)->yaw == doctest::Approx(pi / 4).epsilon(1e-9));
}

TEST_CASE("mount height lifts the pose vertically") {
    PathSampler sampler(wiggle_path());
    SwayConfig config = default_sway();
    for (double t : {0.0, 0.4, 2.2}) {
        auto low = pose_at(sampler, config, t, 0.0);
        auto high = pose_at(sampler, config, t, 1.8);
        REQUIRE(low.has_value());
        REQUIRE(high.has_value());
        CHECK(high->position.z == doctest::Approx(low->position.z + 1.8).epsilon(1e-12));
        CHECK(high->position.x == low->position.x);
        CHECK(high->position.y == low->position.y);
        CHECK(high->yaw == low->yaw);
    }
}

TEST_CASE("pose ends when the path runs out") {
    ScanPath path{{{0, 0, 0}, {10, 0, 0}}, 2.0};
    PathSampler sampler(path);
    SwayConfig none{};
    double t_end = sampler.total_length() / path.walk_speed;
    CHECK(pose_at(sampler, none, t_end - 1e-9, 0.0).has_value());
    CHECK(pose_at(sampler, none, t_end + 1e-6, 0.0) == std::nullopt);
    CHECK(pose_at(sampler, none, 100.0, 0.0) == std::nullopt);
}

} // TEST_SUITE
