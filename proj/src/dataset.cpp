#include "ffs3d/dataset.hpp"

#include <fstream>

#include "ffs3d/errors.hpp"

namespace ffs3d {

std::vector<FramePaths> list_split(const std::filesystem::path& data_root,
                                   const std::filesystem::path& split_file) {
    std::ifstream in(split_file);
    if (!in) throw IoError("cannot open split file: " + split_file.string());

    std::vector<FramePaths> frames;
    std::string line;
    while (std::getline(in, line)) {
        // Trim whitespace and CR endings.
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        const std::string id = line.substr(begin, end - begin + 1);

        FramePaths paths;
        paths.frame_id = id;
        paths.velodyne = data_root / "velodyne" / (id + ".bin");
        paths.calib = data_root / "calib" / (id + ".txt");
        paths.label = data_root / "label_2" / (id + ".txt");
        frames.push_back(std::move(paths));
    }
    return frames;
}

FrameData load_frame(const FramePaths& paths) {
    FrameData frame;
    frame.frame_id = paths.frame_id;
    frame.cloud = load_point_cloud(paths.velodyne);
    frame.calib = load_calibration(paths.calib);
    frame.labels = load_labels(paths.label);
    return frame;
}

}  // namespace ffs3d
