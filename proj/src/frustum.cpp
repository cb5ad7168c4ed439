#include "ffs3d/frustum.hpp"

#include <Eigen/Dense>

#include "ffs3d/errors.hpp"

namespace ffs3d {

namespace {

// Back-projects a pixel through the intrinsic part of P2. KITTI's rectified
// P2 factors as K * [I | t], so K is just the left 3x3 block.
Eigen::Vector3d pixel_ray(const Eigen::Matrix3d& k_inv, double u, double v) {
    return k_inv * Eigen::Vector3d(u, v, 1.0);
}

}  // namespace

Frustum build_frustum(const Box2D& box, const CalibrationSet& calib, double far_plane) {
    if (!box.valid())
        throw DegenerateBoxError("2D box has no area: [" + std::to_string(box.x_min) + "," +
                                 std::to_string(box.y_min) + "," + std::to_string(box.x_max) +
                                 "," + std::to_string(box.y_max) + "]");
    if (far_plane <= 0.0) throw ValidationError("far_plane must be positive");

    const Eigen::Matrix3d k = calib.P2.leftCols<3>();
    const Eigen::Matrix3d k_inv = k.inverse();

    Frustum f;
    // P2 = K [I | t]: rays converge at -t, not at the rect-frame origin.
    // Ignoring the offset would bias the axis laterally by the stereo
    // baseline (tens of centimeters on KITTI).
    f.origin = -(k_inv * calib.P2.col(3));
    f.axis = pixel_ray(k_inv, box.center_u(), box.center_v()).normalized();
    f.near = 0.0;
    f.far = far_plane;

    // Corner rays in image order; each side plane is spanned by two adjacent
    // corner rays and passes through the origin.
    const std::array<Eigen::Vector3d, 4> corners = {
        pixel_ray(k_inv, box.x_min, box.y_min),
        pixel_ray(k_inv, box.x_max, box.y_min),
        pixel_ray(k_inv, box.x_max, box.y_max),
        pixel_ray(k_inv, box.x_min, box.y_max),
    };
    for (std::size_t i = 0; i < 4; ++i) {
        Eigen::Vector3d n = corners[i].cross(corners[(i + 1) % 4]).normalized();
        if (n.dot(f.axis) < 0.0) n = -n;  // orient inward
        f.side_planes[i] = n;
    }
    return f;
}

namespace {

// Scalar dot products, spelled out so that the batched selection loop and
// the per-point predicates agree bit for bit on boundary cases.
inline double offset_dot(const Frustum& f, const Point3& p, const Eigen::Vector3d& v) {
    const double dx = p.x - f.origin.x();
    const double dy = p.y - f.origin.y();
    const double dz = p.z - f.origin.z();
    return dx * v.x() + dy * v.y() + dz * v.z();
}

}  // namespace

double axis_coordinate(const Frustum& frustum, const Point3& p) {
    return offset_dot(frustum, p, frustum.axis);
}

bool point_in_frustum(const Frustum& frustum, const Point3& p) {
    const double t = offset_dot(frustum, p, frustum.axis);
    if (t < frustum.near || t > frustum.far) return false;
    for (const Eigen::Vector3d& n : frustum.side_planes)
        if (offset_dot(frustum, p, n) < 0.0) return false;
    return true;
}

FrustumSelection select_frustum_points(const Frustum& frustum, const PointCloud& cloud) {
    if (cloud.frame != Frame::RECT_CAM)
        throw FrameError("select_frustum_points expects a RECT_CAM cloud");

    // Fused membership + axis-coordinate pass over plain scalars; this is the
    // hot loop of the whole pipeline.
    const double ox = frustum.origin.x(), oy = frustum.origin.y(), oz = frustum.origin.z();
    const double ax = frustum.axis.x(), ay = frustum.axis.y(), az = frustum.axis.z();
    double nx[4], ny[4], nz[4];
    for (int k = 0; k < 4; ++k) {
        nx[k] = frustum.side_planes[k].x();
        ny[k] = frustum.side_planes[k].y();
        nz[k] = frustum.side_planes[k].z();
    }

    FrustumSelection sel;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Point3& p = cloud.points[i];
        const double dx = p.x - ox, dy = p.y - oy, dz = p.z - oz;
        const double t = dx * ax + dy * ay + dz * az;
        if (t < frustum.near || t > frustum.far) continue;
        if (dx * nx[0] + dy * ny[0] + dz * nz[0] < 0.0) continue;
        if (dx * nx[1] + dy * ny[1] + dz * nz[1] < 0.0) continue;
        if (dx * nx[2] + dy * ny[2] + dz * nz[2] < 0.0) continue;
        if (dx * nx[3] + dy * ny[3] + dz * nz[3] < 0.0) continue;
        sel.indices.push_back(i);
        sel.axis_coords.push_back(t);
    }
    return sel;
}

}  // namespace ffs3d
