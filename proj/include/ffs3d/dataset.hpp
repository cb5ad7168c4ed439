#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ffs3d/kitti_io.hpp"
#include "ffs3d/types.hpp"

namespace ffs3d {

// One frame of a KITTI-style directory tree:
//   <root>/velodyne/<id>.bin, <root>/calib/<id>.txt, <root>/label_2/<id>.txt
struct FramePaths {
    std::string frame_id;
    std::filesystem::path velodyne;
    std::filesystem::path calib;
    std::filesystem::path label;
};

struct FrameData {
    std::string frame_id;
    PointCloud cloud;  // LIDAR frame, as stored on disk
    CalibrationSet calib;
    std::vector<GroundTruthObject> labels;
};

// Reads a split file (one frame id per line, blank lines ignored) and
// resolves the per-frame paths. Throws IoError if the split file is missing.
std::vector<FramePaths> list_split(const std::filesystem::path& data_root,
                                   const std::filesystem::path& split_file);

// Loads one frame's cloud, calibration and labels.
FrameData load_frame(const FramePaths& paths);

}  // namespace ffs3d
