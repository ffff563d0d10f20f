#pragma once

#include "chansr/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chansr {

/// Surface coefficients of a scene object. Amplitude coefficients in [0,1];
/// reflection^2 + scattering^2 <= 1 so a surface never amplifies energy.
struct Material {
    double reflection_coeff = 0.0;
    double scattering_coeff = 0.0;

    void validate() const; // throws ConfigError on violation
};

struct SceneObject {
    int id = 0;
    Box box;
    Material material;
};

inline constexpr int kGroundObjectId = 0;

/// A static scene: ground plus axis-aligned boxes (buildings, cars, trees).
/// The ground itself is a regular object (id 0) so ground bounces cluster
/// like any other object.
struct Scene {
    double ground_z = 0.0;
    std::vector<SceneObject> objects;

    /// Suggested transmitter position, filled in by the generators and
    /// stored in the scene file as an optional "tx" key.
    std::optional<Vec3> tx_hint;
    /// Seed the scene was generated from, when procedural.
    std::optional<std::uint64_t> seed;

    void validate() const; // unique ids, valid boxes, valid materials
    const SceneObject* find(int id) const;
    bool point_inside_any(const Vec3& p, double tol = 0.0) const;
};

struct UrbanSceneConfig {
    int grid_nx = 3;
    int grid_ny = 3;
    double street_width = 20.0;
    double building_w_min = 8.0;
    double building_w_max = 14.0;
    double building_d_min = 8.0;
    double building_d_max = 14.0;
    double building_h_min = 10.0;
    double building_h_max = 30.0;
    double ground_z = 0.0;
    double ground_margin = 40.0;
    double refl_min = 0.4;
    double refl_max = 0.8;
    /// Scattering coefficient as a fraction of the residual energy budget
    /// sqrt(1 - reflection^2).
    double scat_frac = 0.5;
    // Tx is placed near the end of the default route corridor, 5-10 m above
    // ground; `nlos_tx` moves it one block over so the corridor is shadowed.
    bool nlos_tx = false;

    void validate() const;
    /// Pitch of the building grid (cell size including the street).
    double pitch() const { return building_w_max + street_width; }
};

struct StreetSceneConfig {
    double road_length = 160.0;
    double road_width = 14.0;
    double building_depth = 12.0;
    double building_len_min = 15.0;
    double building_len_max = 30.0;
    double building_h_min = 8.0;
    double building_h_max = 24.0;
    double building_gap = 6.0;
    int n_cars = 6;
    int n_trees = 6;
    double ground_z = 0.0;
    double ground_margin = 40.0;
    double refl_min = 0.4;
    double refl_max = 0.8;
    double scat_frac = 0.6;

    void validate() const;
};

/// Procedural grid-of-buildings scene. Pure function of (config, seed).
Scene generate_urban_scene(const UrbanSceneConfig& cfg, std::uint64_t seed);

/// Street canyon: building rows lining a road plus small scatterers (cars,
/// trees). Pure function of (config, seed).
Scene generate_street_scene(const StreetSceneConfig& cfg, std::uint64_t seed);

/// Receiver route: `count` positions from `start` along a horizontal unit
/// `direction` at `spacing` metres, all rx_height above ground.
struct RouteSpec {
    Vec3 start{0.0, 0.0, 0.0};
    Vec3 direction{1.0, 0.0, 0.0};
    double spacing = 1.0;
    int count = 17;
    double rx_height = 2.0;

    void validate() const;
};

std::vector<Vec3> generate_route(const RouteSpec& spec, double ground_z = 0.0);

// Scene JSON: {"ground_z": num, "objects": [{"id", "min", "max",
// "reflection_coeff", "scattering_coeff"}], optional "tx", "seed"}.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

} // namespace chansr
