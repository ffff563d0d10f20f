#include "chansr/geometry.hpp"

#include <cmath>

namespace chansr {

std::array<Face, 6> box_faces(const Box& box, int object_id) {
    std::array<Face, 6> faces;
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3;
        const int v = (axis + 2) % 3;
        for (int pos = 0; pos < 2; ++pos) {
            Face& f = faces[static_cast<std::size_t>(axis * 2 + pos)];
            f.object_id = object_id;
            f.index = axis * 2 + pos;
            f.axis = axis;
            f.positive = pos == 1;
            f.plane = f.positive ? box.max[axis] : box.min[axis];
            f.u_axis = u;
            f.v_axis = v;
            f.u_min = box.min[u];
            f.u_max = box.max[u];
            f.v_min = box.min[v];
            f.v_max = box.max[v];
        }
    }
    return faces;
}

int face_of_point(const Box& box, const Vec3& p, double tol) {
    int best = -1;
    double best_dist = tol;
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3;
        const int v = (axis + 2) % 3;
        if (p[u] < box.min[u] - tol || p[u] > box.max[u] + tol) continue;
        if (p[v] < box.min[v] - tol || p[v] > box.max[v] + tol) continue;
        const double d_min = std::abs(p[axis] - box.min[axis]);
        const double d_max = std::abs(p[axis] - box.max[axis]);
        if (d_min <= best_dist) {
            best_dist = d_min;
            best = axis * 2;
        }
        if (d_max <= best_dist) {
            best_dist = d_max;
            best = axis * 2 + 1;
        }
    }
    return best;
}

bool segment_intersects_box(const Vec3& a, const Vec3& b, const Box& box,
                            double tol) {
    // Slab test against the box shrunk by `tol`, clipped to the segment.
    double t0 = 0.0;
    double t1 = 1.0;
    const Vec3 d = b - a;
    for (int axis = 0; axis < 3; ++axis) {
        const double lo = box.min[axis] + tol;
        const double hi = box.max[axis] - tol;
        if (lo >= hi) return false; // box thinner than the tolerance
        if (d[axis] == 0.0) {
            if (a[axis] <= lo || a[axis] >= hi) return false;
        } else {
            const double inv = 1.0 / d[axis];
            double ta = (lo - a[axis]) * inv;
            double tb = (hi - a[axis]) * inv;
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 >= t1) return false;
        }
    }
    return t1 > t0;
}

std::optional<double> segment_plane_param(const Vec3& a, const Vec3& b,
                                          int axis, double plane) {
    const double denom = a[axis] - b[axis];
    if (denom == 0.0) return std::nullopt;
    const double t = (a[axis] - plane) / denom;
    if (t <= 0.0 || t >= 1.0) return std::nullopt;
    return t;
}

} // namespace chansr
