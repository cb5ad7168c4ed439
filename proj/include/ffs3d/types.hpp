#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ffs3d {

// Coordinate frame a point cloud lives in. LIDAR is the velodyne sensor
// frame (x forward, y left, z up); RECT_CAM is the rectified camera frame
// (x right, y down, z forward).
enum class Frame { LIDAR, RECT_CAM };

enum class ClassLabel { Car, Pedestrian, Cyclist };

const char* to_string(ClassLabel label);
std::optional<ClassLabel> class_from_string(const std::string& name);

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double reflectance = 0.0;

    Eigen::Vector3d vec3() const { return {x, y, z}; }
};

struct PointCloud {
    std::vector<Point3> points;
    Frame frame = Frame::LIDAR;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

// KITTI projection and frame-transform matrices.
//   P2:             pixels <- rect-cam meters (left color camera)
//   R0_rect:        rect-cam <- cam0
//   Tr_velo_to_cam: cam0 meters <- velodyne meters
struct CalibrationSet {
    Eigen::Matrix<double, 3, 4> P2 = Eigen::Matrix<double, 3, 4>::Zero();
    Eigen::Matrix3d R0_rect = Eigen::Matrix3d::Identity();
    Eigen::Matrix<double, 3, 4> Tr_velo_to_cam = Eigen::Matrix<double, 3, 4>::Zero();

    static CalibrationSet identity();
};

// Axis-aligned 2D detection box in pixel coordinates.
struct Box2D {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    ClassLabel class_label = ClassLabel::Car;
    std::optional<double> score;

    bool valid() const { return x_min < x_max && y_min < y_max; }
    double center_u() const { return 0.5 * (x_min + x_max); }
    double center_v() const { return 0.5 * (y_min + y_max); }
    double height() const { return y_max - y_min; }
};

// Grow a box by `pixels` on every side. Negative values shrink it.
Box2D dilated(const Box2D& box, double pixels);

// KITTI difficulty buckets, derived from box height / occlusion / truncation.
enum class Difficulty { Easy, Moderate, Hard, Unknown };

const char* to_string(Difficulty d);

struct GroundTruthObject {
    ClassLabel class_label = ClassLabel::Car;
    Point3 center;  // volumetric center, RECT_CAM frame
    double height = 0.0;
    double width = 0.0;
    double length = 0.0;
    double yaw = 0.0;
    Box2D box2d;
    double truncation = 0.0;
    int occlusion = 0;
};

Difficulty difficulty_of(const GroundTruthObject& gt);

}  // namespace ffs3d
