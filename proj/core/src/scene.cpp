#include "chansr/scene.hpp"

#include "chansr/errors.hpp"
#include "chansr/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace chansr {

namespace {

using nlohmann::json;

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw DataError("scene json: expected [x,y,z] triple");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Material draw_material(Rng& rng, double refl_min, double refl_max,
                       double scat_frac) {
    Material m;
    m.reflection_coeff = rng.uniform(refl_min, refl_max);
    m.scattering_coeff =
        scat_frac * std::sqrt(1.0 - m.reflection_coeff * m.reflection_coeff);
    return m;
}

} // namespace

void Material::validate() const {
    if (reflection_coeff < 0.0 || reflection_coeff > 1.0 ||
        scattering_coeff < 0.0 || scattering_coeff > 1.0) {
        throw ConfigError("material coefficients must be in [0,1]");
    }
    const double e = reflection_coeff * reflection_coeff +
                     scattering_coeff * scattering_coeff;
    if (e > 1.0 + 1e-12) {
        throw ConfigError("material amplifies energy: refl^2 + scat^2 > 1");
    }
}

void Scene::validate() const {
    std::set<int> ids;
    for (const auto& obj : objects) {
        if (!obj.box.valid()) {
            throw ConfigError("scene object " + std::to_string(obj.id) +
                              ": box min must be strictly below max");
        }
        obj.material.validate();
        if (!ids.insert(obj.id).second) {
            throw ConfigError("duplicate scene object id " +
                              std::to_string(obj.id));
        }
    }
}

const SceneObject* Scene::find(int id) const {
    for (const auto& obj : objects) {
        if (obj.id == id) return &obj;
    }
    return nullptr;
}

bool Scene::point_inside_any(const Vec3& p, double tol) const {
    for (const auto& obj : objects) {
        if (obj.box.contains(p, tol)) return true;
    }
    return false;
}

void UrbanSceneConfig::validate() const {
    if (grid_nx <= 0 || grid_ny <= 0) {
        throw ConfigError("urban scene: grid dimensions must be positive");
    }
    if (street_width <= 0.0 || building_w_min <= 0.0 || building_d_min <= 0.0 ||
        building_h_min <= 0.0) {
        throw ConfigError("urban scene: sizes must be positive");
    }
    if (building_w_max < building_w_min || building_d_max < building_d_min ||
        building_h_max < building_h_min) {
        throw ConfigError("urban scene: size ranges must satisfy min <= max");
    }
    if (refl_min < 0.0 || refl_max > 1.0 || refl_max < refl_min ||
        scat_frac < 0.0 || scat_frac > 1.0) {
        throw ConfigError("urban scene: invalid material ranges");
    }
}

Scene generate_urban_scene(const UrbanSceneConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);

    const double p = cfg.pitch();
    const double extent_x = cfg.grid_nx * p;
    const double extent_y = cfg.grid_ny * p;

    Scene scene;
    scene.ground_z = cfg.ground_z;
    scene.seed = seed;

    SceneObject ground;
    ground.id = kGroundObjectId;
    ground.box.min = Vec3(-cfg.ground_margin, -cfg.ground_margin, cfg.ground_z - 1.0);
    ground.box.max = Vec3(extent_x + cfg.ground_margin, extent_y + cfg.ground_margin,
                          cfg.ground_z);
    ground.material = draw_material(rng, cfg.refl_min, cfg.refl_max, cfg.scat_frac);
    scene.objects.push_back(ground);

    // Buildings sit on grid cells; street corridors run along y = j * pitch.
    int next_id = 1;
    for (int i = 0; i < cfg.grid_nx; ++i) {
        for (int j = 0; j < cfg.grid_ny; ++j) {
            const double w = rng.uniform(cfg.building_w_min, cfg.building_w_max);
            const double d = rng.uniform(cfg.building_d_min, cfg.building_d_max);
            const double h = rng.uniform(cfg.building_h_min, cfg.building_h_max);
            const double cx = (i + 0.5) * p;
            const double cy = (j + 0.5) * p;
            SceneObject b;
            b.id = next_id++;
            b.box.min = Vec3(cx - 0.5 * w, cy - 0.5 * d, cfg.ground_z);
            b.box.max = Vec3(cx + 0.5 * w, cy + 0.5 * d, cfg.ground_z + h);
            b.material = draw_material(rng, cfg.refl_min, cfg.refl_max, cfg.scat_frac);
            scene.objects.push_back(b);
        }
    }

    // Table-style Tx siting: 5-10 m above ground, beside the default route
    // corridor (y = 0), near its far end. The NLOS variant moves the Tx one
    // block over so buildings shadow the corridor.
    const double tx_h = rng.uniform(5.0, 10.0);
    Vec3 tx(0.8 * extent_x, 0.25 * cfg.street_width, cfg.ground_z + tx_h);
    if (cfg.nlos_tx) {
        tx.y() = p;
    }
    scene.tx_hint = tx;

    scene.validate();
    return scene;
}

void StreetSceneConfig::validate() const {
    if (road_length <= 0.0 || road_width <= 0.0 || building_depth <= 0.0) {
        throw ConfigError("street scene: sizes must be positive");
    }
    if (building_len_max < building_len_min || building_h_max < building_h_min) {
        throw ConfigError("street scene: size ranges must satisfy min <= max");
    }
    if (n_cars < 0 || n_trees < 0) {
        throw ConfigError("street scene: scatterer counts must be >= 0");
    }
    if (refl_min < 0.0 || refl_max > 1.0 || refl_max < refl_min ||
        scat_frac < 0.0 || scat_frac > 1.0) {
        throw ConfigError("street scene: invalid material ranges");
    }
}

Scene generate_street_scene(const StreetSceneConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);

    const double setback = 3.0; // sidewalk strip between road edge and walls
    const double wall_y0 = 0.5 * cfg.road_width + setback;

    Scene scene;
    scene.ground_z = cfg.ground_z;
    scene.seed = seed;

    SceneObject ground;
    ground.id = kGroundObjectId;
    const double gy = wall_y0 + cfg.building_depth + cfg.ground_margin;
    ground.box.min = Vec3(-cfg.ground_margin, -gy, cfg.ground_z - 1.0);
    ground.box.max = Vec3(cfg.road_length + cfg.ground_margin, gy, cfg.ground_z);
    ground.material = draw_material(rng, cfg.refl_min, cfg.refl_max, cfg.scat_frac);
    scene.objects.push_back(ground);

    int next_id = 1;

    // Building rows on both sides of the road.
    for (int side = 0; side < 2; ++side) {
        const double sign = side == 0 ? 1.0 : -1.0;
        double x = 0.0;
        while (x < cfg.road_length) {
            const double len =
                rng.uniform(cfg.building_len_min, cfg.building_len_max);
            const double h = rng.uniform(cfg.building_h_min, cfg.building_h_max);
            const double x1 = std::min(x + len, cfg.road_length + cfg.ground_margin * 0.5);
            SceneObject b;
            b.id = next_id++;
            const double y0 = sign * wall_y0;
            const double y1 = sign * (wall_y0 + cfg.building_depth);
            b.box.min = Vec3(x, std::min(y0, y1), cfg.ground_z);
            b.box.max = Vec3(x1, std::max(y0, y1), cfg.ground_z + h);
            b.material =
                draw_material(rng, cfg.refl_min, cfg.refl_max, cfg.scat_frac);
            scene.objects.push_back(b);
            x = x1 + cfg.building_gap;
        }
    }

    // Fine scatterers: parked cars at the road edges, trees on the sidewalks.
    auto overlaps_existing = [&scene](const Box& box) {
        for (const auto& obj : scene.objects) {
            if (obj.id == kGroundObjectId) continue;
            bool separated = false;
            for (int a = 0; a < 3 && !separated; ++a) {
                separated = box.max[a] <= obj.box.min[a] ||
                            box.min[a] >= obj.box.max[a];
            }
            if (!separated) return true;
        }
        return false;
    };

    const double car_l = 4.5, car_w = 1.8, car_h = 1.5;
    for (int k = 0; k < cfg.n_cars; ++k) {
        for (int attempt = 0; attempt < 16; ++attempt) {
            const double x = rng.uniform(0.0, cfg.road_length - car_l);
            const double sign = rng.uniform01() < 0.5 ? 1.0 : -1.0;
            const double y_edge = sign * (0.5 * cfg.road_width - 0.4);
            Box box;
            box.min = Vec3(x, std::min(y_edge, y_edge - sign * car_w), cfg.ground_z);
            box.max = Vec3(x + car_l, std::max(y_edge, y_edge - sign * car_w),
                           cfg.ground_z + car_h);
            if (overlaps_existing(box)) continue;
            SceneObject car;
            car.id = next_id++;
            car.box = box;
            car.material =
                draw_material(rng, cfg.refl_min, cfg.refl_max, cfg.scat_frac);
            scene.objects.push_back(car);
            break;
        }
    }

    const double tree_w = 1.0;
    for (int k = 0; k < cfg.n_trees; ++k) {
        for (int attempt = 0; attempt < 16; ++attempt) {
            const double x = rng.uniform(0.0, cfg.road_length - tree_w);
            const double sign = rng.uniform01() < 0.5 ? 1.0 : -1.0;
            const double h = rng.uniform(3.0, 6.0);
            const double y0 = sign * (0.5 * cfg.road_width + 0.8);
            Box box;
            box.min = Vec3(x, std::min(y0, y0 + sign * tree_w), cfg.ground_z);
            box.max = Vec3(x + tree_w, std::max(y0, y0 + sign * tree_w),
                           cfg.ground_z + h);
            if (overlaps_existing(box)) continue;
            SceneObject tree;
            tree.id = next_id++;
            tree.box = box;
            tree.material =
                draw_material(rng, cfg.refl_min, cfg.refl_max, cfg.scat_frac);
            scene.objects.push_back(tree);
            break;
        }
    }

    const double tx_h = rng.uniform(5.0, 10.0);
    scene.tx_hint =
        Vec3(0.85 * cfg.road_length, -(0.5 * cfg.road_width + 1.5), cfg.ground_z + tx_h);

    scene.validate();
    return scene;
}

void RouteSpec::validate() const {
    if (spacing <= 0.0) {
        throw ConfigError("route: spacing must be positive");
    }
    if (std::abs(direction.norm() - 1.0) > 1e-12) {
        throw ConfigError("route: direction must be a unit vector");
    }
    if (std::abs(direction.z()) > 1e-12) {
        throw ConfigError("route: direction must be horizontal");
    }
    if (count < 17) {
        throw DataError("route too short: need at least 17 snapshots to form "
                        "one sample, got " + std::to_string(count));
    }
}

std::vector<Vec3> generate_route(const RouteSpec& spec, double ground_z) {
    spec.validate();
    std::vector<Vec3> points;
    points.reserve(static_cast<std::size_t>(spec.count));
    const double z = ground_z + spec.rx_height;
    for (int k = 0; k < spec.count; ++k) {
        const double s = spec.spacing * k;
        points.emplace_back(spec.start.x() + s * spec.direction.x(),
                            spec.start.y() + s * spec.direction.y(), z);
    }
    return points;
}

std::string scene_to_json(const Scene& scene) {
    json j;
    j["ground_z"] = scene.ground_z;
    json objs = json::array();
    for (const auto& obj : scene.objects) {
        json o;
        o["id"] = obj.id;
        o["min"] = vec3_to_json(obj.box.min);
        o["max"] = vec3_to_json(obj.box.max);
        o["reflection_coeff"] = obj.material.reflection_coeff;
        o["scattering_coeff"] = obj.material.scattering_coeff;
        objs.push_back(std::move(o));
    }
    j["objects"] = std::move(objs);
    if (scene.tx_hint) j["tx"] = vec3_to_json(*scene.tx_hint);
    if (scene.seed) j["seed"] = *scene.seed;
    return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("scene json parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("ground_z") || !j.contains("objects")) {
        throw DataError("scene json: missing ground_z or objects");
    }
    Scene scene;
    scene.ground_z = j["ground_z"].get<double>();
    for (const auto& o : j["objects"]) {
        SceneObject obj;
        obj.id = o.at("id").get<int>();
        obj.box.min = vec3_from_json(o.at("min"));
        obj.box.max = vec3_from_json(o.at("max"));
        obj.material.reflection_coeff = o.at("reflection_coeff").get<double>();
        obj.material.scattering_coeff = o.at("scattering_coeff").get<double>();
        scene.objects.push_back(obj);
    }
    if (j.contains("tx")) scene.tx_hint = vec3_from_json(j["tx"]);
    if (j.contains("seed")) scene.seed = j["seed"].get<std::uint64_t>();
    scene.validate();
    return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open scene file for writing: " + path);
    out << scene_to_json(scene);
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open scene file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scene_from_json(ss.str());
}

} // namespace chansr
