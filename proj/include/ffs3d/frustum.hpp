#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "ffs3d/types.hpp"

namespace ffs3d {

// 3D region lifted from a 2D box. The origin is the camera optical center
// (shifted by the P2 translation column), the axis is the unit back-projected
// ray through the box center, and the four side planes pass through the
// origin with inward-pointing unit normals.
struct Frustum {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    std::array<Eigen::Vector3d, 4> side_planes{};
    double near = 0.0;
    double far = 0.0;
};

// Indices of the cloud points inside a frustum, with the axis coordinate of
// each selected point. Both sequences have equal length and keep the source
// cloud order.
struct FrustumSelection {
    std::vector<std::size_t> indices;
    std::vector<double> axis_coords;

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

// Lifts a 2D box to a frustum: near plane at the origin (near = 0), far
// plane at `far_plane` meters along the axis. Throws DegenerateBoxError if
// the box has no area.
Frustum build_frustum(const Box2D& box, const CalibrationSet& calib, double far_plane);

// Signed distance of p along the frustum axis: dot(p - origin, axis).
// Negative behind the camera.
double axis_coordinate(const Frustum& frustum, const Point3& p);

// True iff p lies in all four inward half-spaces and its axis coordinate is
// within [near, far]. Boundary points count as inside.
bool point_in_frustum(const Frustum& frustum, const Point3& p);

// All cloud points passing point_in_frustum, in original order. Throws
// FrameError unless the cloud is in RECT_CAM.
FrustumSelection select_frustum_points(const Frustum& frustum, const PointCloud& cloud);

}  // namespace ffs3d
