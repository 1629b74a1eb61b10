#include "forestscan/error_model.hpp"

#include <cmath>
#include <stdexcept>

namespace forestscan {

void validate(const DivergenceTable& table, double max_range) {
    if (table.segments.empty())
        throw std::invalid_argument("divergence table must have at least one segment");
    double prev = 0.0;
    for (const auto& seg : table.segments) {
        if (!(seg.upper_distance > prev))
            throw std::invalid_argument("divergence segment bounds must be strictly increasing and positive");
        if (seg.h_div < 0.0 || seg.v_div < 0.0)
            throw std::invalid_argument("divergence values must be non-negative");
        prev = seg.upper_distance;
    }
    if (prev < max_range)
        throw std::invalid_argument("divergence table must cover the sensor max range");
}

DivergenceTable default_divergence_table(double max_range) {
    DivergenceTable table;
    for (int i = 1; i <= 4; ++i) {
        double upper = max_range * i / 4.0;
        table.segments.push_back({upper, 1.5e-3 * upper, 1.0e-3 * upper});
    }
    return table;
}

std::pair<double, double> divergence_at(const DivergenceTable& table, double distance) {
    if (!(distance > 0.0))
        throw std::invalid_argument("divergence lookup requires a positive distance");
    for (const auto& seg : table.segments)
        if (distance <= seg.upper_distance) return {seg.h_div, seg.v_div};
    throw std::invalid_argument("distance beyond divergence table coverage");
}

EllipseOffset sample_ellipse_offset(KeyedRng& rng, double h_div, double v_div) {
    if (h_div <= 0.0 || v_div <= 0.0) return {0.0, 0.0};
    for (;;) {
        double a = rng.next_double(-h_div, h_div);
        double b = rng.next_double(-v_div, v_div);
        double na = a / h_div;
        double nb = b / v_div;
        if (na * na + nb * nb <= 1.0) return {a, b};
    }
}

BeamFrame make_beam_frame(const Vec3& direction) {
    const Vec3 up{0.0, 0.0, 1.0};
    Vec3 h = cross(up, direction);
    double n = norm(h);
    if (n < 1e-12) {
        // Beam points straight up/down; any horizontal direction works.
        h = Vec3{1.0, 0.0, 0.0};
    } else {
        h = h / n;
    }
    Vec3 v = normalized(cross(direction, h));
    return {h, v};
}

Vec3 apply_coordinate_offset(const Vec3& point, const EllipseOffset& offset,
                             const BeamFrame& frame) {
    return point + frame.horizontal * offset.a + frame.vertical * offset.b;
}

std::pair<double, double> perturb_angle(KeyedRng& rng, double distance, double h_div,
                                        double v_div) {
    if (!(distance > 0.0))
        throw std::invalid_argument("angle perturbation requires a positive distance");
    double max_az = std::atan(h_div / distance);
    double max_el = std::atan(v_div / distance);
    double u = rng.next_double(-1.0, 1.0);
    double w = rng.next_double(-1.0, 1.0);
    return {u * max_az, w * max_el};
}

} // namespace forestscan
