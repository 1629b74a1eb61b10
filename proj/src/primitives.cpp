#include "forestscan/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace forestscan {

namespace {

// Orthonormal basis with w as the third axis; w must be unit length.
void branchless_basis(const Vec3& w, Vec3& u, Vec3& v) {
    double sign = std::copysign(1.0, w.z);
    double a = -1.0 / (sign + w.z);
    double b = w.x * w.y * a;
    u = {1.0 + sign * w.x * w.x * a, sign * b, -sign * w.x};
    v = {b, sign + w.y * w.y * a, -w.y};
}

} // namespace

Aabb primitive_bounds(const LabeledPrimitive& prim) {
    Aabb box;
    if (const auto* tri = std::get_if<Triangle>(&prim.geometry)) {
        box.expand(tri->a);
        box.expand(tri->b);
        box.expand(tri->c);
    } else if (const auto* cone = std::get_if<TruncatedCone>(&prim.geometry)) {
        // Conservative: both end discs padded by the larger radius.
        double r = std::max(cone->base_radius, cone->top_radius);
        Vec3 pad{r, r, r};
        box.expand(cone->base_center - pad);
        box.expand(cone->base_center + pad);
        box.expand(cone->base_center + cone->axis - pad);
        box.expand(cone->base_center + cone->axis + pad);
    } else {
        const auto& disc = std::get<Disc>(prim.geometry);
        // Exact per-axis extent of a disc: r * sqrt(1 - n_i^2).
        Vec3 e{disc.radius * std::sqrt(std::max(0.0, 1.0 - disc.normal.x * disc.normal.x)),
               disc.radius * std::sqrt(std::max(0.0, 1.0 - disc.normal.y * disc.normal.y)),
               disc.radius * std::sqrt(std::max(0.0, 1.0 - disc.normal.z * disc.normal.z))};
        box.expand(disc.center - e);
        box.expand(disc.center + e);
    }
    return box;
}

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, double t_max,
                                         const Triangle& tri) {
    // Moller-Trumbore, edges inclusive so shared terrain edges hit both
    // triangles and the index tie-break decides.
    Vec3 e1 = tri.b - tri.a;
    Vec3 e2 = tri.c - tri.a;
    Vec3 p = cross(dir, e2);
    double det = dot(e1, p);
    if (std::fabs(det) < 1e-14) return std::nullopt;
    double inv_det = 1.0 / det;
    Vec3 s = origin - tri.a;
    double u = dot(s, p) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    Vec3 q = cross(s, e1);
    double v = dot(dir, q) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    double t = dot(e2, q) * inv_det;
    if (t <= 0.0 || t > t_max) return std::nullopt;
    return t;
}

std::optional<double> intersect_cone(const Vec3& origin, const Vec3& dir, double t_max,
                                     const TruncatedCone& cone) {
    double height = norm(cone.axis);
    if (height <= 0.0) return std::nullopt;
    Vec3 w = cone.axis / height;
    Vec3 u, v;
    branchless_basis(w, u, v);

    // Local frame: base center at the origin, +z along the axis.
    Vec3 rel = origin - cone.base_center;
    Vec3 o{dot(rel, u), dot(rel, v), dot(rel, w)};
    Vec3 d{dot(dir, u), dot(dir, v), dot(dir, w)};

    // Lateral surface: x^2 + y^2 = (r0 + k z)^2 with k the radius slope.
    double k = (cone.top_radius - cone.base_radius) / height;
    double r0 = cone.base_radius;

    double a = d.x * d.x + d.y * d.y - k * k * d.z * d.z;
    double b = 2.0 * (o.x * d.x + o.y * d.y - k * d.z * (r0 + k * o.z));
    double c = o.x * o.x + o.y * o.y - (r0 + k * o.z) * (r0 + k * o.z);

    double roots[2];
    int n_roots = 0;
    if (std::fabs(a) < 1e-14) {
        if (std::fabs(b) >= 1e-14) roots[n_roots++] = -c / b;
    } else {
        double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) return std::nullopt;
        double sq = std::sqrt(disc);
        // Stable quadratic: compute the larger-magnitude root first.
        double q = (b >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
        roots[n_roots++] = q / a;
        if (q != 0.0) roots[n_roots++] = c / q;
    }

    if (n_roots == 2 && roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    for (int i = 0; i < n_roots; ++i) {
        double t = roots[i];
        if (t <= 0.0 || t > t_max) continue;
        double z = o.z + t * d.z;
        if (z < 0.0 || z > height) continue;
        return t;
    }
    return std::nullopt;
}

std::optional<double> intersect_disc(const Vec3& origin, const Vec3& dir, double t_max,
                                     const Disc& disc) {
    double denom = dot(dir, disc.normal);
    if (std::fabs(denom) < 1e-14) return std::nullopt;
    double t = dot(disc.center - origin, disc.normal) / denom;
    if (t <= 0.0 || t > t_max) return std::nullopt;
    Vec3 p = origin + dir * t;
    if (norm_squared(p - disc.center) > disc.radius * disc.radius) return std::nullopt;
    return t;
}

std::optional<double> intersect_primitive(const Vec3& origin, const Vec3& dir, double t_max,
                                          const LabeledPrimitive& prim) {
    if (const auto* tri = std::get_if<Triangle>(&prim.geometry))
        return intersect_triangle(origin, dir, t_max, *tri);
    if (const auto* cone = std::get_if<TruncatedCone>(&prim.geometry))
        return intersect_cone(origin, dir, t_max, *cone);
    return intersect_disc(origin, dir, t_max, std::get<Disc>(prim.geometry));
}

bool intersect_aabb(const Vec3& origin, const Vec3& inv_dir, double t_max, const Aabb& box,
                    double& t_entry) {
    // Axis-parallel rays need the explicit containment test: with the ray
    // origin exactly on a box plane the slab product is 0 * inf = NaN, and
    // fmin/fmax would turn that into a bogus +inf lower bound.
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    const double o[3] = {origin.x, origin.y, origin.z};
    const double inv[3] = {inv_dir.x, inv_dir.y, inv_dir.z};
    const double lo[3] = {box.min.x, box.min.y, box.min.z};
    const double hi[3] = {box.max.x, box.max.y, box.max.z};
    for (int axis = 0; axis < 3; ++axis) {
        if (std::isinf(inv[axis])) {
            if (o[axis] < lo[axis] || o[axis] > hi[axis]) return false;
            continue;
        }
        double t1 = (lo[axis] - o[axis]) * inv[axis];
        double t2 = (hi[axis] - o[axis]) * inv[axis];
        tmin = std::fmax(tmin, std::fmin(t1, t2));
        tmax = std::fmin(tmax, std::fmax(t1, t2));
    }
    if (tmax < tmin || tmax < 0.0 || tmin > t_max) return false;
    t_entry = std::fmax(tmin, 0.0);
    return true;
}

} // namespace forestscan
