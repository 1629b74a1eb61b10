#include "forestscan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forestscan/rng.hpp"

namespace forestscan {

namespace {

constexpr double breast_height = 1.3;
constexpr uint64_t tag_terrain = stream_tag("terrain-noise");
constexpr uint64_t tag_leaf = stream_tag("leaf");
constexpr uint64_t tag_tree_count = stream_tag("tree-count");
constexpr uint64_t tag_species = stream_tag("species");
constexpr uint64_t tag_placement = stream_tag("placement");
constexpr uint64_t tag_tree = stream_tag("tree");

// Noise lattice is coarser than the mesh so slopes stay gentle.
constexpr double noise_cells_per_lattice = 4.0;

double lattice_value(uint64_t seed, int64_t i, int64_t j) {
    KeyedRng rng(seed, tag_terrain, i, j);
    return rng.next_double(-1.0, 1.0);
}

// Bilinear value noise in [-1, 1].
double value_noise(uint64_t seed, double x, double y, double lattice_cell) {
    double gx = x / lattice_cell;
    double gy = y / lattice_cell;
    double fx = gx - std::floor(gx);
    double fy = gy - std::floor(gy);
    auto i = static_cast<int64_t>(std::floor(gx));
    auto j = static_cast<int64_t>(std::floor(gy));
    double v00 = lattice_value(seed, i, j);
    double v10 = lattice_value(seed, i + 1, j);
    double v01 = lattice_value(seed, i, j + 1);
    double v11 = lattice_value(seed, i + 1, j + 1);
    double a = v00 + (v10 - v00) * fx;
    double b = v01 + (v11 - v01) * fx;
    return a + (b - a) * fy;
}

struct TerrainGrid {
    int nx, ny;
    double x0, y0, dx, dy;

    TerrainGrid(std::pair<double, double> extent, double cell) {
        nx = std::max(1, static_cast<int>(std::ceil(extent.first / cell - 1e-9)));
        ny = std::max(1, static_cast<int>(std::ceil(extent.second / cell - 1e-9)));
        x0 = -extent.first / 2.0;
        y0 = -extent.second / 2.0;
        dx = extent.first / nx;
        dy = extent.second / ny;
    }
};

double vertex_height(uint64_t seed, const TerrainGrid& g, double amplitude, double lattice,
                     int i, int j) {
    if (amplitude == 0.0) return 0.0;
    return amplitude * value_noise(seed, g.x0 + i * g.dx, g.y0 + j * g.dy, lattice);
}

void check_extent(std::pair<double, double> extent, double cell) {
    if (!(extent.first > 0.0) || !(extent.second > 0.0))
        throw std::invalid_argument("terrain: extent must be positive");
    if (!(cell > 0.0)) throw std::invalid_argument("terrain: cell must be positive");
}

double r_ground_for(const TreeSpec& spec) {
    double denom = 1.0 - (1.0 - spec.taper) * breast_height / spec.trunk_height;
    if (denom <= 0.0)
        throw std::invalid_argument("tree '" + spec.species_name +
                                    "': trunk too short to extrapolate dbh to the ground");
    return (spec.dbh / 2.0) / denom;
}

Vec3 unit_sphere_direction(KeyedRng& rng) {
    double z = rng.next_double(-1.0, 1.0);
    double phi = rng.next_double(0.0, 2.0 * pi);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

} // namespace

void validate(const TreeSpec& spec) {
    if (spec.species_name.empty()) throw std::invalid_argument("tree: species_name empty");
    if (!(spec.dbh > 0.0)) throw std::invalid_argument("tree '" + spec.species_name + "': dbh must be > 0");
    if (!(spec.taper >= 0.0 && spec.taper < 1.0))
        throw std::invalid_argument("tree '" + spec.species_name + "': taper must be in [0,1)");
    if (!(spec.canopy_base_height >= 0.0))
        throw std::invalid_argument("tree '" + spec.species_name + "': canopy_base_height must be >= 0");
    if (!(spec.trunk_height > spec.canopy_base_height))
        throw std::invalid_argument("tree '" + spec.species_name +
                                    "': trunk_height must exceed canopy_base_height");
    if (!(spec.canopy_radius > 0.0))
        throw std::invalid_argument("tree '" + spec.species_name + "': canopy_radius must be > 0");
    if (spec.leaf_count > 0 && !(spec.leaf_radius > 0.0))
        throw std::invalid_argument("tree '" + spec.species_name +
                                    "': leaf_radius must be > 0 when leaves are present");
    r_ground_for(spec);
}

void validate(const SceneSpec& spec) {
    check_extent(spec.extent, spec.terrain_cell);
    if (!(spec.terrain_amplitude >= 0.0))
        throw std::invalid_argument("scene: terrain_amplitude must be >= 0");
    if (spec.tree_count_range.first > spec.tree_count_range.second)
        throw std::invalid_argument("scene: tree_count_range min exceeds max");
    if (!(spec.min_tree_spacing >= 0.0))
        throw std::invalid_argument("scene: min_tree_spacing must be >= 0");
    if (spec.species_mix.empty()) throw std::invalid_argument("scene: species_mix is empty");
    double total = 0.0;
    for (const auto& [tree, weight] : spec.species_mix) {
        if (!(weight >= 0.0)) throw std::invalid_argument("scene: species weight must be >= 0");
        validate(tree);
        total += weight;
    }
    if (!(total > 0.0)) throw std::invalid_argument("scene: species weights are all zero");
}

std::vector<LabeledPrimitive> generate_terrain(uint64_t seed, std::pair<double, double> extent,
                                               double amplitude, double cell) {
    check_extent(extent, cell);
    if (!(amplitude >= 0.0)) throw std::invalid_argument("terrain: amplitude must be >= 0");

    TerrainGrid g(extent, cell);
    double lattice = noise_cells_per_lattice * cell;

    std::vector<Vec3> verts;
    verts.reserve(static_cast<size_t>(g.nx + 1) * (g.ny + 1));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            verts.push_back({g.x0 + i * g.dx, g.y0 + j * g.dy,
                             vertex_height(seed, g, amplitude, lattice, i, j)});

    auto at = [&](int i, int j) -> const Vec3& { return verts[j * (g.nx + 1) + i]; };

    std::vector<LabeledPrimitive> prims;
    prims.reserve(static_cast<size_t>(g.nx) * g.ny * 2);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            LabeledPrimitive p;
            p.leaf_wood = LeafWood::NotApplicable;
            p.semantic = Semantic::Ground;
            p.instance = 0;
            p.geometry = Triangle{at(i, j), at(i + 1, j), at(i + 1, j + 1)};
            prims.push_back(p);
            p.geometry = Triangle{at(i, j), at(i + 1, j + 1), at(i, j + 1)};
            prims.push_back(p);
        }
    }
    return prims;
}

double terrain_height(uint64_t seed, std::pair<double, double> extent, double amplitude,
                      double cell, double x, double y) {
    check_extent(extent, cell);
    TerrainGrid g(extent, cell);
    double lattice = noise_cells_per_lattice * cell;

    double gx = std::clamp((x - g.x0) / g.dx, 0.0, static_cast<double>(g.nx));
    double gy = std::clamp((y - g.y0) / g.dy, 0.0, static_cast<double>(g.ny));
    int i = std::min(static_cast<int>(gx), g.nx - 1);
    int j = std::min(static_cast<int>(gy), g.ny - 1);
    double fx = gx - i;
    double fy = gy - j;

    double h00 = vertex_height(seed, g, amplitude, lattice, i, j);
    double h10 = vertex_height(seed, g, amplitude, lattice, i + 1, j);
    double h01 = vertex_height(seed, g, amplitude, lattice, i, j + 1);
    double h11 = vertex_height(seed, g, amplitude, lattice, i + 1, j + 1);

    // The cell diagonal (v00,v11) splits it into the two mesh triangles.
    if (fx >= fy) return h00 + (fx - fy) * (h10 - h00) + fy * (h11 - h00);
    return h00 + fx * (h11 - h00) + (fy - fx) * (h01 - h00);
}

std::vector<LabeledPrimitive> build_tree(const TreeSpec& spec, uint32_t instance,
                                         const Vec3& root, uint64_t seed) {
    validate(spec);

    std::vector<LabeledPrimitive> prims;
    double height = spec.trunk_height;
    double r_ground = r_ground_for(spec);
    double r_top = spec.taper * r_ground;
    auto radius_at = [&](double z) { return r_ground + (r_top - r_ground) * z / height; };

    int segments = std::max(4, static_cast<int>(std::ceil(height / 2.0)));
    for (int s = 0; s < segments; ++s) {
        double z0 = height * s / segments;
        double z1 = height * (s + 1) / segments;
        LabeledPrimitive p;
        p.geometry = TruncatedCone{root + Vec3{0.0, 0.0, z0}, {0.0, 0.0, z1 - z0},
                                   radius_at(z0), radius_at(z1)};
        p.leaf_wood = LeafWood::Wood;
        p.semantic = Semantic::Tree;
        p.instance = instance;
        prims.push_back(p);
    }

    Vec3 centroid = root + Vec3{0.0, 0.0, spec.canopy_base_height + spec.canopy_radius};
    for (uint32_t leaf = 0; leaf < spec.leaf_count; ++leaf) {
        KeyedRng rng(seed, tag_leaf, leaf);
        Vec3 dir = unit_sphere_direction(rng);
        double r = spec.canopy_radius * std::cbrt(rng.next_double());
        LabeledPrimitive p;
        p.geometry = Disc{centroid + dir * r, unit_sphere_direction(rng), spec.leaf_radius};
        p.leaf_wood = LeafWood::Leaf;
        p.semantic = Semantic::Tree;
        p.instance = instance;
        prims.push_back(p);
    }
    return prims;
}

void finalize_scene(Scene& scene) {
    scene.bounds = Aabb{};
    for (const auto& p : scene.primitives) scene.bounds.expand(primitive_bounds(p));
    scene.accelerator = scene.primitives.empty() ? Bvh{} : Bvh::build(scene.primitives);
}

Scene generate_forest(const SceneSpec& spec) {
    validate(spec);

    Scene scene;
    scene.primitives = generate_terrain(spec.seed, spec.extent, spec.terrain_amplitude,
                                        spec.terrain_cell);
    scene.instance_table[0] = InstanceInfo{Semantic::Ground, "", {0.0, 0.0, 0.0}};

    uint32_t lo = spec.tree_count_range.first;
    uint32_t hi = spec.tree_count_range.second;
    uint32_t requested = lo;
    if (hi > lo) {
        KeyedRng rng(spec.seed, tag_tree_count);
        requested = lo + static_cast<uint32_t>(rng.next_below(hi - lo + 1));
    }

    double total_weight = 0.0;
    for (const auto& [tree, weight] : spec.species_mix) total_weight += weight;

    double half_w = spec.extent.first / 2.0;
    double half_d = spec.extent.second / 2.0;
    double spacing_sq = spec.min_tree_spacing * spec.min_tree_spacing;

    std::vector<Vec3> roots;
    for (uint32_t k = 0; k < requested; ++k) {
        KeyedRng species_rng(spec.seed, tag_species, k);
        double pick = species_rng.next_double() * total_weight;
        size_t species = 0;
        double cum = 0.0;
        for (size_t s = 0; s < spec.species_mix.size(); ++s) {
            cum += spec.species_mix[s].second;
            if (pick < cum) {
                species = s;
                break;
            }
            species = s;
        }

        KeyedRng place_rng(spec.seed, tag_placement, k);
        bool placed = false;
        Vec3 root;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            double x = place_rng.next_double(-half_w, half_w);
            double y = place_rng.next_double(-half_d, half_d);
            bool clear = true;
            for (const auto& other : roots) {
                double ddx = other.x - x, ddy = other.y - y;
                if (ddx * ddx + ddy * ddy < spacing_sq) {
                    clear = false;
                    break;
                }
            }
            if (!clear) continue;
            root = {x, y,
                    terrain_height(spec.seed, spec.extent, spec.terrain_amplitude,
                                   spec.terrain_cell, x, y)};
            placed = true;
        }
        if (!placed) {
            scene.placement_gave_up = true;
            continue;
        }

        roots.push_back(root);
        auto instance = static_cast<uint32_t>(roots.size());
        const TreeSpec& tree = spec.species_mix[species].first;
        uint64_t tree_seed = KeyedRng(spec.seed, tag_tree, instance).derive();
        auto prims = build_tree(tree, instance, root, tree_seed);
        scene.primitives.insert(scene.primitives.end(), prims.begin(), prims.end());
        scene.instance_table[instance] = InstanceInfo{Semantic::Tree, tree.species_name, root};
    }

    finalize_scene(scene);
    return scene;
}

} // namespace forestscan
