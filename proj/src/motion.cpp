#include "forestscan/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forestscan {

namespace {

constexpr double knot_alpha = 0.5; // centripetal
constexpr double degenerate_interval = 1e-12;

// One level of the Barry-Goldman pyramid: value and derivative of the
// linear blend between a and b over [ta, tb]. Duplicated endpoints collapse
// the interval; the blend then degenerates to the constant b.
struct Blend {
    Vec3 value;
    Vec3 deriv;
};

Blend blend(const Blend& a, const Blend& b, double ta, double tb, double t) {
    double span = tb - ta;
    if (span < degenerate_interval) return {b.value, {0.0, 0.0, 0.0}};
    double wa = (tb - t) / span;
    double wb = (t - ta) / span;
    Vec3 value = a.value * wa + b.value * wb;
    Vec3 deriv = a.deriv * wa + b.deriv * wb + (b.value - a.value) / span;
    return {value, deriv};
}

} // namespace

PathSampler::PathSampler(const ScanPath& path, int samples_per_segment) {
    if (path.control_points.size() < 2)
        throw std::invalid_argument("path: needs at least 2 control points");
    if (samples_per_segment < 8)
        throw std::invalid_argument("path: samples_per_segment must be >= 8");
    for (size_t i = 1; i < path.control_points.size(); ++i)
        if (path.control_points[i] == path.control_points[i - 1])
            throw std::invalid_argument("path: consecutive control points must be distinct");
    if (!(path.walk_speed > 0.0)) throw std::invalid_argument("path: walk_speed must be > 0");
    walk_speed_ = path.walk_speed;

    const auto& cp = path.control_points;
    auto point = [&](int i) -> const Vec3& {
        return cp[static_cast<size_t>(std::clamp<int>(i, 0, static_cast<int>(cp.size()) - 1))];
    };

    for (int seg = 0; seg + 1 < static_cast<int>(cp.size()); ++seg) {
        Segment s;
        s.p[0] = point(seg - 1);
        s.p[1] = point(seg);
        s.p[2] = point(seg + 1);
        s.p[3] = point(seg + 2);
        s.knot[0] = 0.0;
        for (int k = 1; k < 4; ++k)
            s.knot[k] = s.knot[k - 1] + std::pow(norm(s.p[k] - s.p[k - 1]), knot_alpha);
        segments_.push_back(s);
    }

    table_.push_back({0.0, 0, 0.0});
    double s_cum = 0.0;
    for (int seg = 0; seg < static_cast<int>(segments_.size()); ++seg) {
        Vec3 prev = eval_segment(seg, 0.0);
        for (int k = 1; k <= samples_per_segment; ++k) {
            double u = static_cast<double>(k) / samples_per_segment;
            Vec3 next = eval_segment(seg, u);
            s_cum += norm(next - prev);
            table_.push_back({s_cum, seg, u});
            prev = next;
        }
    }
    total_length_ = s_cum;
}

Vec3 PathSampler::eval_segment(int segment, double u) const {
    const Segment& s = segments_[segment];
    double t = s.knot[1] + u * (s.knot[2] - s.knot[1]);
    Blend p0{s.p[0], {}}, p1{s.p[1], {}}, p2{s.p[2], {}}, p3{s.p[3], {}};
    Blend a1 = blend(p0, p1, s.knot[0], s.knot[1], t);
    Blend a2 = blend(p1, p2, s.knot[1], s.knot[2], t);
    Blend a3 = blend(p2, p3, s.knot[2], s.knot[3], t);
    Blend b1 = blend(a1, a2, s.knot[0], s.knot[2], t);
    Blend b2 = blend(a2, a3, s.knot[1], s.knot[3], t);
    return blend(b1, b2, s.knot[1], s.knot[2], t).value;
}

Vec3 PathSampler::eval_derivative(int segment, double u) const {
    const Segment& s = segments_[segment];
    double t = s.knot[1] + u * (s.knot[2] - s.knot[1]);
    Blend p0{s.p[0], {}}, p1{s.p[1], {}}, p2{s.p[2], {}}, p3{s.p[3], {}};
    Blend a1 = blend(p0, p1, s.knot[0], s.knot[1], t);
    Blend a2 = blend(p1, p2, s.knot[1], s.knot[2], t);
    Blend a3 = blend(p2, p3, s.knot[2], s.knot[3], t);
    Blend b1 = blend(a1, a2, s.knot[0], s.knot[2], t);
    Blend b2 = blend(a2, a3, s.knot[1], s.knot[3], t);
    return blend(b1, b2, s.knot[1], s.knot[2], t).deriv;
}

void PathSampler::locate(double s, int& segment, double& u) const {
    s = std::clamp(s, 0.0, total_length_);
    auto it = std::lower_bound(table_.begin(), table_.end(), s,
                               [](const TableEntry& e, double v) { return e.s < v; });
    if (it == table_.begin()) {
        segment = table_.front().segment;
        u = table_.front().u;
        return;
    }
    const TableEntry& hi = *it;
    const TableEntry& lo = *(it - 1);
    double span = hi.s - lo.s;
    double f = span > 0.0 ? (s - lo.s) / span : 0.0;
    if (lo.segment == hi.segment) {
        segment = lo.segment;
        u = lo.u + f * (hi.u - lo.u);
    } else {
        // lo ends one segment (u = 1), hi starts the next; the spline is
        // continuous there, so interpolate within hi's segment.
        segment = hi.segment;
        u = f * hi.u;
    }
}

Vec3 PathSampler::point_at(double s) const {
    int segment;
    double u;
    locate(s, segment, u);
    return eval_segment(segment, u);
}

Vec3 PathSampler::tangent_at(double s) const {
    int segment;
    double u;
    locate(s, segment, u);
    Vec3 d = eval_derivative(segment, u);
    double n = norm(d);
    if (n < 1e-12) {
        // Derivative vanishes at duplicated-endpoint knots; fall back to the
        // segment chord.
        d = segments_[segment].p[2] - segments_[segment].p[1];
        n = norm(d);
    }
    return d / n;
}

std::pair<double, double> sway(const SwayConfig& config, double t) {
    double dz = config.amp_vertical *
                std::sin(2.0 * pi * config.freq_vertical * t + config.phase_vertical);
    double dlat = config.amp_lateral *
                  std::sin(2.0 * pi * config.freq_lateral * t + config.phase_lateral);
    return {dz, dlat};
}

std::optional<Pose> pose_at(const PathSampler& sampler, const SwayConfig& sway_config, double t,
                            double mount_height) {
    double s = sampler.walk_speed() * t;
    // The tabulated arc length carries rounding of ~1 ulp per chord; without
    // slack the pose exactly at the path end could be rejected.
    double end = sampler.total_length();
    if (s > end + 1e-12 * (1.0 + end)) return std::nullopt;

    Vec3 base = sampler.point_at(s);
    Vec3 tangent = sampler.tangent_at(s);
    auto [dz, dlat] = sway(sway_config, t);

    Vec3 lateral = cross(Vec3{0.0, 0.0, 1.0}, tangent);
    double n = norm(lateral);
    lateral = n > 1e-12 ? lateral / n : Vec3{0.0, 1.0, 0.0};

    Pose pose;
    pose.position = base + Vec3{0.0, 0.0, dz + mount_height} + lateral * dlat;
    pose.yaw = std::atan2(tangent.y, tangent.x);
    return pose;
}

} // namespace forestscan
