#include "chansr/raytracer.hpp"

#include "chansr/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace chansr {

namespace {

using nlohmann::json;

constexpr double kFaceTol = 1e-9; // reflection point containment tolerance

struct FaceSet {
    std::vector<Face> faces;
    std::vector<double> refl_gain_db; // 20 log10(reflection_coeff), -inf if 0
    std::vector<double> scat_gain_db; // 20 log10(scattering_coeff), -inf if 0
};

FaceSet collect_faces(const Scene& scene) {
    FaceSet fs;
    fs.faces.reserve(scene.objects.size() * 6);
    for (const auto& obj : scene.objects) {
        const double rc = obj.material.reflection_coeff;
        const double sc = obj.material.scattering_coeff;
        const double rg = rc > 0.0 ? 20.0 * std::log10(rc)
                                   : -std::numeric_limits<double>::infinity();
        const double sg = sc > 0.0 ? 20.0 * std::log10(sc)
                                   : -std::numeric_limits<double>::infinity();
        for (const Face& f : box_faces(obj.box, obj.id)) {
            fs.faces.push_back(f);
            fs.refl_gain_db.push_back(rg);
            fs.scat_gain_db.push_back(sg);
        }
    }
    return fs;
}

bool segment_occluded(const Scene& scene, const Vec3& a, const Vec3& b) {
    for (const auto& obj : scene.objects) {
        if (segment_intersects_box(a, b, obj.box, kOcclusionTol)) return true;
    }
    return false;
}

Ray make_ray(int object_id, const Vec3& point, double path_m, double power_dbm,
             Mechanism mech) {
    Ray r;
    r.object_id = object_id;
    r.interaction_point = point;
    r.path_length_m = path_m;
    r.delay_s = path_m / kSpeedOfLight;
    r.power_dbm = power_dbm;
    r.mechanism = mech;
    return r;
}

} // namespace

const char* mechanism_name(Mechanism m) {
    switch (m) {
    case Mechanism::kLos: return "LOS";
    case Mechanism::kReflection: return "REFL";
    case Mechanism::kScattering: return "SCAT";
    }
    return "?";
}

Mechanism mechanism_from_name(const std::string& name) {
    if (name == "LOS") return Mechanism::kLos;
    if (name == "REFL") return Mechanism::kReflection;
    if (name == "SCAT") return Mechanism::kScattering;
    throw DataError("unknown mechanism: " + name);
}

void TraceLimits::validate() const {
    if (max_reflection_order < 0 || max_reflection_order > 2) {
        throw ConfigError("max_reflection_order must be 0, 1 or 2");
    }
    if (frequency_hz <= 0.0) {
        throw ConfigError("carrier frequency must be positive");
    }
}

double fspl_db(double distance_m, double frequency_hz) {
    if (distance_m <= 0.0) {
        throw std::domain_error("fspl_db: distance must be positive");
    }
    if (frequency_hz <= 0.0) {
        throw std::domain_error("fspl_db: frequency must be positive");
    }
    return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) +
           20.0 * std::log10(4.0 * std::numbers::pi / kSpeedOfLight);
}

std::optional<Ray> trace_los(const Scene& scene, const Vec3& tx, const Vec3& rx,
                             const TraceLimits& limits) {
    limits.validate();
    if (segment_occluded(scene, tx, rx)) return std::nullopt;
    const double d = (rx - tx).norm();
    const double power = limits.tx_power_dbm - fspl_db(d, limits.frequency_hz);
    return make_ray(kLosObjectId, 0.5 * (tx + rx), d, power, Mechanism::kLos);
}

std::vector<Ray> trace_reflections(const Scene& scene, const Vec3& tx,
                                   const Vec3& rx, const TraceLimits& limits) {
    limits.validate();
    std::vector<Ray> rays;
    if (limits.max_reflection_order < 1) return rays;

    const FaceSet fs = collect_faces(scene);
    const std::size_t n = fs.faces.size();

    // First order: mirror Tx across the face, intersect the image-Rx segment
    // with the face plane, keep in-rectangle unoccluded bounces.
    for (std::size_t i = 0; i < n; ++i) {
        const Face& f = fs.faces[i];
        if (!std::isfinite(fs.refl_gain_db[i])) continue;
        if (f.side(tx) <= kFaceTol || f.side(rx) <= kFaceTol) continue;
        const Vec3 img = mirror_point(tx, f.axis, f.plane);
        const auto t = segment_plane_param(img, rx, f.axis, f.plane);
        if (!t) continue;
        const Vec3 p = img + *t * (rx - img);
        if (!f.contains(p, kFaceTol)) continue;
        if (segment_occluded(scene, tx, p) || segment_occluded(scene, p, rx)) {
            continue;
        }
        const double path = (p - tx).norm() + (rx - p).norm();
        const double power = limits.tx_power_dbm -
                             fspl_db(path, limits.frequency_hz) +
                             fs.refl_gain_db[i];
        if (power < limits.min_power_dbm) continue;
        rays.push_back(
            make_ray(f.object_id, p, path, power, Mechanism::kReflection));
    }

    if (limits.max_reflection_order < 2) return rays;

    // Second order: double image. Faces of one convex box cannot bounce into
    // each other, so same-object pairs are skipped.
    for (std::size_t i = 0; i < n; ++i) {
        const Face& f1 = fs.faces[i];
        if (!std::isfinite(fs.refl_gain_db[i])) continue;
        if (f1.side(tx) <= kFaceTol) continue;
        const Vec3 img1 = mirror_point(tx, f1.axis, f1.plane);
        for (std::size_t k = 0; k < n; ++k) {
            const Face& f2 = fs.faces[k];
            if (f2.object_id == f1.object_id) continue;
            if (!std::isfinite(fs.refl_gain_db[k])) continue;
            if (f2.side(rx) <= kFaceTol) continue;
            const Vec3 img2 = mirror_point(img1, f2.axis, f2.plane);
            const auto t2 = segment_plane_param(img2, rx, f2.axis, f2.plane);
            if (!t2) continue;
            const Vec3 p2 = img2 + *t2 * (rx - img2);
            if (!f2.contains(p2, kFaceTol)) continue;
            const auto t1 = segment_plane_param(img1, p2, f1.axis, f1.plane);
            if (!t1) continue;
            const Vec3 p1 = img1 + *t1 * (p2 - img1);
            if (!f1.contains(p1, kFaceTol)) continue;
            // Both bounces must happen on the outward side of their faces.
            if (f1.side(p2) <= kFaceTol || f2.side(p1) <= kFaceTol) continue;
            if (segment_occluded(scene, tx, p1) ||
                segment_occluded(scene, p1, p2) ||
                segment_occluded(scene, p2, rx)) {
                continue;
            }
            const double path =
                (p1 - tx).norm() + (p2 - p1).norm() + (rx - p2).norm();
            const double power = limits.tx_power_dbm -
                                 fspl_db(path, limits.frequency_hz) +
                                 fs.refl_gain_db[i] + fs.refl_gain_db[k];
            if (power < limits.min_power_dbm) continue;
            rays.push_back(
                make_ray(f2.object_id, p2, path, power, Mechanism::kReflection));
        }
    }
    return rays;
}

std::vector<Ray> trace_scattering(const Scene& scene, const Vec3& tx,
                                  const Vec3& rx, const TraceLimits& limits) {
    limits.validate();
    std::vector<Ray> rays;
    const FaceSet fs = collect_faces(scene);
    for (std::size_t i = 0; i < fs.faces.size(); ++i) {
        if (!std::isfinite(fs.scat_gain_db[i])) continue;
        const Face& f = fs.faces[i];
        const Vec3 c = f.center();
        const Vec3 n = f.normal();
        const double d1 = (c - tx).norm();
        const double d2 = (rx - c).norm();
        if (d1 <= 0.0 || d2 <= 0.0) continue;
        const double cos_in = n.dot(tx - c) / d1;
        const double cos_out = n.dot(rx - c) / d2;
        if (cos_in <= 0.0 || cos_out <= 0.0) continue;
        if (segment_occluded(scene, tx, c) || segment_occluded(scene, c, rx)) {
            continue;
        }
        const double power = limits.tx_power_dbm -
                             fspl_db(d1, limits.frequency_hz) -
                             fspl_db(d2, limits.frequency_hz) +
                             fs.scat_gain_db[i] +
                             10.0 * std::log10(cos_in * cos_out);
        if (power < limits.min_power_dbm) continue;
        rays.push_back(
            make_ray(f.object_id, c, d1 + d2, power, Mechanism::kScattering));
    }
    return rays;
}

Snapshot trace_snapshot(const Scene& scene, const Vec3& tx, const Vec3& rx,
                        int index, const TraceLimits& limits) {
    Snapshot snap;
    snap.index = index;
    snap.rx_position = rx;
    if (auto los = trace_los(scene, tx, rx, limits)) {
        snap.rays.push_back(*los);
    }
    auto refl = trace_reflections(scene, tx, rx, limits);
    snap.rays.insert(snap.rays.end(), refl.begin(), refl.end());
    auto scat = trace_scattering(scene, tx, rx, limits);
    snap.rays.insert(snap.rays.end(), scat.begin(), scat.end());
    return snap;
}

std::vector<Snapshot> trace_route(const Scene& scene, const Vec3& tx,
                                  const std::vector<Vec3>& route,
                                  const TraceLimits& limits, int n_threads) {
    limits.validate();
    for (std::size_t k = 0; k < route.size(); ++k) {
        if (scene.point_inside_any(route[k])) {
            throw DataError("route point " + std::to_string(k) +
                            " lies inside a scene object");
        }
    }
    if (scene.point_inside_any(tx)) {
        throw DataError("tx position lies inside a scene object");
    }

    std::vector<Snapshot> snaps(route.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            snaps[k] =
                trace_snapshot(scene, tx, route[k], static_cast<int>(k), limits);
        }
    };

    const std::size_t n = route.size();
    const auto want =
        static_cast<std::size_t>(std::max(1, n_threads));
    if (want <= 1 || n < 2) {
        worker(0, n);
        return snaps;
    }
    const std::size_t workers = std::min(want, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(begin + chunk, n);
        if (begin >= end) break;
        pool.emplace_back(worker, begin, end);
    }
    for (auto& t : pool) t.join();
    return snaps;
}

std::string snapshot_to_json_line(const Snapshot& snap) {
    json j;
    j["index"] = snap.index;
    j["rx"] = json::array(
        {snap.rx_position.x(), snap.rx_position.y(), snap.rx_position.z()});
    json rays = json::array();
    for (const Ray& r : snap.rays) {
        json o;
        o["object_id"] = r.object_id;
        o["point"] = json::array({r.interaction_point.x(),
                                  r.interaction_point.y(),
                                  r.interaction_point.z()});
        o["path_m"] = r.path_length_m;
        o["delay_s"] = r.delay_s;
        o["power_dbm"] = r.power_dbm;
        o["mech"] = mechanism_name(r.mechanism);
        rays.push_back(std::move(o));
    }
    j["rays"] = std::move(rays);
    return j.dump();
}

Snapshot snapshot_from_json_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(std::string("snapshot json parse error: ") + e.what());
    }
    Snapshot snap;
    snap.index = j.at("index").get<int>();
    const auto& rx = j.at("rx");
    snap.rx_position = Vec3(rx[0].get<double>(), rx[1].get<double>(),
                            rx[2].get<double>());
    for (const auto& o : j.at("rays")) {
        Ray r;
        r.object_id = o.at("object_id").get<int>();
        const auto& p = o.at("point");
        r.interaction_point =
            Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        r.path_length_m = o.at("path_m").get<double>();
        r.delay_s = o.at("delay_s").get<double>();
        r.power_dbm = o.at("power_dbm").get<double>();
        r.mechanism = mechanism_from_name(o.at("mech").get<std::string>());
        snap.rays.push_back(r);
    }
    return snap;
}

void save_snapshots(const std::vector<Snapshot>& snaps,
                    const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open snapshot file for writing: " + path);
    for (const auto& s : snaps) {
        out << snapshot_to_json_line(s) << "\n";
    }
}

std::vector<Snapshot> load_snapshots(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open snapshot file: " + path);
    std::vector<Snapshot> snaps;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        snaps.push_back(snapshot_from_json_line(line));
    }
    return snaps;
}

} // namespace chansr
