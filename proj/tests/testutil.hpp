#pragma once

// Shared helpers for the test suites: deterministic synthetic scenes,
// brute-force oracles, and a KITTI-style directory fixture.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ffs3d/frustum.hpp"
#include "ffs3d/heuristic.hpp"
#include "ffs3d/kitti_io.hpp"
#include "ffs3d/types.hpp"

namespace testutil {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Brute-force oracles. These recompute results by independent iteration and
// must stay ignorant of the library's incremental implementations.
// ---------------------------------------------------------------------------

struct OracleHistogram {
    std::vector<std::uint64_t> counts;
    std::vector<double> weights;
};

// O(N * num_bins): for every bin, recount the points landing in it and the
// points landing within `neighbor_bins` of it. The per-bin weight is
// count + w * neighbor_count, the same two floating-point operations the
// library performs, so agreement must be bit-exact.
inline OracleHistogram oracle_histogram(const std::vector<double>& axis_coords, double near,
                                        double far, double bin_length, int neighbor_bins,
                                        double w) {
    const auto num_bins =
        static_cast<std::size_t>(std::ceil((far - near) / bin_length));
    std::vector<std::ptrdiff_t> point_bins;
    point_bins.reserve(axis_coords.size());
    for (double t : axis_coords) {
        auto idx = static_cast<std::ptrdiff_t>(std::floor((t - near) / bin_length));
        if (idx < 0) idx = 0;
        if (idx >= static_cast<std::ptrdiff_t>(num_bins))
            idx = static_cast<std::ptrdiff_t>(num_bins) - 1;
        point_bins.push_back(idx);
    }

    OracleHistogram hist;
    hist.counts.assign(num_bins, 0);
    hist.weights.assign(num_bins, 0.0);
    for (std::size_t i = 0; i < num_bins; ++i) {
        std::uint64_t count = 0;
        std::uint64_t neighbors = 0;
        for (std::ptrdiff_t b : point_bins) {
            const auto d = b - static_cast<std::ptrdiff_t>(i);
            if (d == 0)
                ++count;
            else if (d >= -neighbor_bins && d <= neighbor_bins)
                ++neighbors;
        }
        hist.counts[i] = count;
        hist.weights[i] = static_cast<double>(count) + w * static_cast<double>(neighbors);
    }
    return hist;
}

// Independent per-point membership filter.
inline ffs3d::FrustumSelection oracle_select(const ffs3d::Frustum& frustum,
                                             const ffs3d::PointCloud& cloud) {
    ffs3d::FrustumSelection sel;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (ffs3d::point_in_frustum(frustum, cloud.points[i])) {
            sel.indices.push_back(i);
            sel.axis_coords.push_back(ffs3d::axis_coordinate(frustum, cloud.points[i]));
        }
    }
    return sel;
}

// ---------------------------------------------------------------------------
// Synthetic geometry
// ---------------------------------------------------------------------------

// Calibration in the ballpark of a KITTI color camera, including the
// baseline offset folded into P2's fourth column.
inline ffs3d::CalibrationSet kitti_like_calib() {
    ffs3d::CalibrationSet calib;
    calib.P2 << 707.0, 0.0, 604.0, 45.75, 0.0, 707.0, 180.5, -0.34, 0.0, 0.0, 1.0, 0.005;
    // Rotation of a few degrees about each axis, orthonormal by construction.
    calib.R0_rect = (Eigen::AngleAxisd(0.01, Eigen::Vector3d::UnitZ()) *
                     Eigen::AngleAxisd(-0.008, Eigen::Vector3d::UnitY()) *
                     Eigen::AngleAxisd(0.012, Eigen::Vector3d::UnitX()))
                        .toRotationMatrix();
    // Velodyne-to-camera: axis permutation (x fwd, y left, z up -> x right,
    // y down, z fwd) plus a small lever arm.
    Eigen::Matrix3d rot;
    rot << 0, -1, 0, 0, 0, -1, 1, 0, 0;
    calib.Tr_velo_to_cam.leftCols<3>() = rot;
    calib.Tr_velo_to_cam.col(3) = Eigen::Vector3d(0.0, -0.08, -0.27);
    return calib;
}

inline ffs3d::Point3 rect_to_velo(const ffs3d::Point3& p, const ffs3d::CalibrationSet& calib) {
    const Eigen::Matrix3d tr_rot = calib.Tr_velo_to_cam.leftCols<3>();
    const Eigen::Vector3d tr_t = calib.Tr_velo_to_cam.col(3);
    const Eigen::Vector3d cam = calib.R0_rect.transpose() * p.vec3();
    const Eigen::Vector3d velo = tr_rot.transpose() * (cam - tr_t);
    return ffs3d::Point3{velo.x(), velo.y(), velo.z(), p.reflectance};
}

// Places points inside the frustum at the requested axis coordinates, with a
// small lateral jitter that stays well inside the cone.
inline ffs3d::PointCloud rect_cloud_at(const ffs3d::Frustum& frustum,
                                     const std::vector<double>& axis_coords, Rng& rng) {
    const Eigen::Vector3d axis = frustum.axis;
    Eigen::Vector3d side = axis.cross(Eigen::Vector3d::UnitY()).normalized();
    Eigen::Vector3d up = axis.cross(side).normalized();
    std::uniform_real_distribution<double> jitter(-0.004, 0.004);

    ffs3d::PointCloud cloud;
    cloud.frame = ffs3d::Frame::RECT_CAM;
    cloud.points.reserve(axis_coords.size());
    for (double t : axis_coords) {
        const Eigen::Vector3d p =
            frustum.origin + t * axis + (t * jitter(rng)) * side + (t * jitter(rng)) * up;
        cloud.points.push_back(ffs3d::Point3{p.x(), p.y(), p.z(), 0.25});
    }
    return cloud;
}

inline std::vector<double> uniform_coords(std::size_t n, double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (double& t : out) t = dist(rng);
    return out;
}

// ---------------------------------------------------------------------------
// KITTI-style directory fixture
// ---------------------------------------------------------------------------

inline std::string fmt_full(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline void write_calib_file(const std::filesystem::path& path,
                             const ffs3d::CalibrationSet& calib) {
    std::ofstream out(path);
    auto row_major = [](const auto& m) {
        std::string s;
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) s += " " + fmt_full(m(r, c));
        return s;
    };
    out << "P0:" << row_major(calib.P2) << "\n";  // extra keys must be ignored
    out << "P2:" << row_major(calib.P2) << "\n";
    out << "R0_rect:" << row_major(calib.R0_rect) << "\n";
    out << "Tr_velo_to_cam:" << row_major(calib.Tr_velo_to_cam) << "\n";
}

// One label line from a volumetric center (RECT_CAM). KITTI stores the
// bottom-center, so y is written center.y + h/2.
inline std::string label_line(const ffs3d::GroundTruthObject& gt) {
    std::ostringstream os;
    os << ffs3d::to_string(gt.class_label) << " " << fmt_full(gt.truncation) << " "
       << gt.occlusion << " 0 " << fmt_full(gt.box2d.x_min) << " " << fmt_full(gt.box2d.y_min)
       << " " << fmt_full(gt.box2d.x_max) << " " << fmt_full(gt.box2d.y_max) << " "
       << fmt_full(gt.height) << " " << fmt_full(gt.width) << " " << fmt_full(gt.length) << " "
       << fmt_full(gt.center.x) << " " << fmt_full(gt.center.y + gt.height / 2.0) << " "
       << fmt_full(gt.center.z) << " " << fmt_full(gt.yaw);
    return os.str();
}

inline void write_label_file(const std::filesystem::path& path,
                             const std::vector<ffs3d::GroundTruthObject>& gts) {
    std::ofstream out(path);
    for (const auto& gt : gts) out << label_line(gt) << "\n";
}

struct FixtureFrame {
    std::string frame_id;
    ffs3d::PointCloud cloud_lidar;
    std::vector<ffs3d::GroundTruthObject> gts;
};

// A frame with one object per requested (class, depth): a dense cluster at
// the object depth plus uniform background along each frustum axis.
inline FixtureFrame make_scene_frame(const std::string& frame_id,
                                     const ffs3d::CalibrationSet& calib,
                                     const std::vector<std::pair<ffs3d::ClassLabel, double>>& objs,
                                     Rng& rng, double far_plane = 70.0) {
    FixtureFrame frame;
    frame.frame_id = frame_id;
    ffs3d::PointCloud rect;
    rect.frame = ffs3d::Frame::RECT_CAM;

    double u0 = 350.0;
    for (const auto& [label, depth] : objs) {
        ffs3d::GroundTruthObject gt;
        gt.class_label = label;
        gt.box2d.class_label = label;
        gt.box2d.x_min = u0;
        gt.box2d.x_max = u0 + 90.0;
        gt.box2d.y_min = 160.0;
        gt.box2d.y_max = 240.0;
        u0 += 140.0;

        const ffs3d::Frustum frustum = ffs3d::build_frustum(gt.box2d, calib, far_plane);
        std::vector<double> coords;
        auto cluster = uniform_coords(400, depth - 1.0, depth + 1.0, rng);
        auto background = uniform_coords(80, 0.5, far_plane, rng);
        coords.insert(coords.end(), cluster.begin(), cluster.end());
        coords.insert(coords.end(), background.begin(), background.end());
        const ffs3d::PointCloud part = rect_cloud_at(frustum, coords, rng);
        rect.points.insert(rect.points.end(), part.points.begin(), part.points.end());

        const Eigen::Vector3d center = frustum.origin + depth * frustum.axis;
        gt.center = ffs3d::Point3{center.x(), center.y(), center.z(), 0.0};
        gt.height = 1.6;
        gt.width = 1.7;
        gt.length = 4.0;
        gt.yaw = 0.0;
        frame.gts.push_back(gt);
    }

    frame.cloud_lidar.frame = ffs3d::Frame::LIDAR;
    frame.cloud_lidar.points.reserve(rect.points.size());
    for (const auto& p : rect.points) frame.cloud_lidar.points.push_back(rect_to_velo(p, calib));
    return frame;
}

// Writes velodyne/, calib/, label_2/ and a split file; returns the split path.
inline std::filesystem::path write_fixture_tree(const std::filesystem::path& root,
                                                const ffs3d::CalibrationSet& calib,
                                                const std::vector<FixtureFrame>& frames) {
    namespace fs = std::filesystem;
    fs::create_directories(root / "velodyne");
    fs::create_directories(root / "calib");
    fs::create_directories(root / "label_2");

    std::ofstream split(root / "split.txt");
    for (const auto& frame : frames) {
        ffs3d::save_point_cloud(frame.cloud_lidar, root / "velodyne" / (frame.frame_id + ".bin"));
        write_calib_file(root / "calib" / (frame.frame_id + ".txt"), calib);
        write_label_file(root / "label_2" / (frame.frame_id + ".txt"), frame.gts);
        split << frame.frame_id << "\n";
    }
    split.close();
    return root / "split.txt";
}

// Unique scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ffs3d_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testutil
