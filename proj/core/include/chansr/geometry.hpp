#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>

namespace chansr {

using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

/// Interior tolerance for occlusion tests: a segment only counts as blocked
/// when it passes through the box shrunk by this much on every side, so
/// points lying exactly on a surface (reflection points, facet centers) do
/// not occlude themselves.
inline constexpr double kOcclusionTol = 1e-9;

/// Axis-aligned box, min strictly less than max on all three axes.
struct Box {
    Vec3 min{0.0, 0.0, 0.0};
    Vec3 max{0.0, 0.0, 0.0};

    bool valid() const {
        return min.x() < max.x() && min.y() < max.y() && min.z() < max.z();
    }

    Vec3 center() const { return 0.5 * (min + max); }

    /// Strict interior of the box shrunk by `shrink` on every side.
    bool contains(const Vec3& p, double shrink = 0.0) const {
        for (int a = 0; a < 3; ++a) {
            if (p[a] <= min[a] + shrink || p[a] >= max[a] - shrink) return false;
        }
        return true;
    }
};

/// One of the six faces of a box. `axis` is the normal axis and `positive`
/// selects which of the two parallel planes; the outward normal is
/// +-unit(axis). The rectangle spans (u_axis, v_axis).
struct Face {
    int object_id = 0;
    int index = 0; // 0..5 == axis * 2 + (positive ? 1 : 0)
    int axis = 0;
    bool positive = true;
    double plane = 0.0;
    int u_axis = 1;
    int v_axis = 2;
    double u_min = 0.0, u_max = 0.0;
    double v_min = 0.0, v_max = 0.0;

    Vec3 normal() const {
        Vec3 n = Vec3::Zero();
        n[axis] = positive ? 1.0 : -1.0;
        return n;
    }

    Vec3 center() const {
        Vec3 c;
        c[axis] = plane;
        c[u_axis] = 0.5 * (u_min + u_max);
        c[v_axis] = 0.5 * (v_min + v_max);
        return c;
    }

    /// Signed distance of p from the face plane along the outward normal.
    double side(const Vec3& p) const {
        return (positive ? 1.0 : -1.0) * (p[axis] - plane);
    }

    /// Is a point (assumed on the plane) within the face rectangle?
    bool contains(const Vec3& p, double tol) const {
        return p[u_axis] >= u_min - tol && p[u_axis] <= u_max + tol &&
               p[v_axis] >= v_min - tol && p[v_axis] <= v_max + tol;
    }
};

std::array<Face, 6> box_faces(const Box& box, int object_id);

/// Face index (0..5) of the box face containing p, or -1 when p is not on
/// the box surface within `tol`. Ties pick the nearest plane.
int face_of_point(const Box& box, const Vec3& p, double tol = 1e-6);

/// Does the open segment a-b pass through the interior of `box` shrunk by
/// `tol`? Surface contact does not count.
bool segment_intersects_box(const Vec3& a, const Vec3& b, const Box& box,
                            double tol = kOcclusionTol);

/// Parameter t in (0,1) where segment a-b crosses the plane {x[axis] ==
/// plane}, or nullopt when the segment is parallel or does not reach it.
std::optional<double> segment_plane_param(const Vec3& a, const Vec3& b,
                                          int axis, double plane);

/// Mirror p across the plane {x[axis] == plane}.
inline Vec3 mirror_point(const Vec3& p, int axis, double plane) {
    Vec3 q = p;
    q[axis] = 2.0 * plane - p[axis];
    return q;
}

} // namespace chansr
