#pragma once

#include "chansr/geometry.hpp"
#include "chansr/scene.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chansr {

enum class Mechanism { kLos, kReflection, kScattering };

const char* mechanism_name(Mechanism m); // "LOS", "REFL", "SCAT"
Mechanism mechanism_from_name(const std::string& name);

/// Object id carried by line-of-sight rays (no interaction).
inline constexpr int kLosObjectId = -1;

/// One traced propagation path. For LOS rays the interaction point is the
/// Tx-Rx midpoint by convention; for multi-bounce reflections it is the last
/// bounce.
struct Ray {
    int object_id = kLosObjectId;
    Vec3 interaction_point{0.0, 0.0, 0.0};
    double path_length_m = 0.0;
    double delay_s = 0.0;
    double power_dbm = 0.0;
    Mechanism mechanism = Mechanism::kLos;
};

/// All rays at one receiver position along a route.
struct Snapshot {
    int index = 0;
    Vec3 rx_position{0.0, 0.0, 0.0};
    std::vector<Ray> rays;
};

struct TraceLimits {
    int max_reflection_order = 2; // 0, 1 or 2
    double min_power_dbm = -150.0; // reflection/scattering cutoff
    double frequency_hz = 3.55e9;
    double tx_power_dbm = 0.1;

    void validate() const;
};

/// Free-space path loss in dB:
/// 20 log10(d) + 20 log10(f) + 20 log10(4 pi / c).
/// Throws std::domain_error for non-positive distance.
double fspl_db(double distance_m, double frequency_hz);

/// Direct ray, present iff the open Tx-Rx segment meets no object interior.
std::optional<Ray> trace_los(const Scene& scene, const Vec3& tx, const Vec3& rx,
                             const TraceLimits& limits);

/// Specular reflections via the image method, up to
/// limits.max_reflection_order bounces off box faces.
std::vector<Ray> trace_reflections(const Scene& scene, const Vec3& tx,
                                   const Vec3& rx, const TraceLimits& limits);

/// Single-bounce scattering: one ray per box face whose center sees both
/// endpoints, with cosine-weighted power.
std::vector<Ray> trace_scattering(const Scene& scene, const Vec3& tx,
                                  const Vec3& rx, const TraceLimits& limits);

/// LOS + reflections + scattering at one receiver position.
Snapshot trace_snapshot(const Scene& scene, const Vec3& tx, const Vec3& rx,
                        int index, const TraceLimits& limits);

/// One snapshot per route point, ordered by route index. Snapshots are
/// independent; n_threads > 1 splits the route across workers without
/// changing the result.
std::vector<Snapshot> trace_route(const Scene& scene, const Vec3& tx,
                                  const std::vector<Vec3>& route,
                                  const TraceLimits& limits, int n_threads = 1);

// Snapshot JSON-lines: one snapshot per line,
// {"index", "rx", "rays": [{"object_id", "point", "path_m", "delay_s",
//  "power_dbm", "mech"}]}.
std::string snapshot_to_json_line(const Snapshot& snap);
Snapshot snapshot_from_json_line(const std::string& line);
void save_snapshots(const std::vector<Snapshot>& snaps, const std::string& path);
std::vector<Snapshot> load_snapshots(const std::string& path);

} // namespace chansr
