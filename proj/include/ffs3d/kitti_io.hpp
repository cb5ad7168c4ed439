#pragma once

#include <filesystem>
#include <vector>

#include "ffs3d/types.hpp"

namespace ffs3d {

// Reads a KITTI velodyne scan: consecutive 16-byte records of four
// little-endian float32 values (x, y, z, reflectance), no header.
// Throws IoError if the file cannot be read, FormatError if the byte length
// is not a multiple of 16 or any value is non-finite.
PointCloud load_point_cloud(const std::filesystem::path& path);

// Writes the same binary layout (doubles narrowed to float32).
void save_point_cloud(const PointCloud& cloud, const std::filesystem::path& path);

// Parses a KITTI calibration text file ("KEY: v1 v2 ... vN" lines).
// Requires P2 (12 values), R0_rect (9) and Tr_velo_to_cam (12); other keys
// are ignored. Throws FormatError on a missing key / wrong value count /
// unparseable number, ValidationError if R0_rect is not orthonormal within
// 1e-3 or either focal length is non-positive.
CalibrationSet load_calibration(const std::filesystem::path& path);

// Parses a KITTI label file (15 whitespace-separated fields per line).
// Lines whose type is not Car, Pedestrian or Cyclist are skipped. The stored
// center is the volumetric box center: KITTI's bottom-center location lifted
// by height/2 (camera y points down). Throws FormatError on a malformed line.
std::vector<GroundTruthObject> load_labels(const std::filesystem::path& path);

// Parses a detection file: same 15-field layout, optionally followed by a
// 16th confidence score. Returns the 2D boxes only.
std::vector<Box2D> load_detections(const std::filesystem::path& path);

// Maps a LIDAR-frame cloud into the rectified camera frame:
// p' = R0_rect * (Tr_velo_to_cam * [p; 1]). Reflectance and point order
// are preserved. Throws FrameError if the cloud is already in RECT_CAM.
PointCloud velo_to_rect(const PointCloud& cloud, const CalibrationSet& calib);

}  // namespace ffs3d
