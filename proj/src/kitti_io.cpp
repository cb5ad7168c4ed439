#include "ffs3d/kitti_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ffs3d/errors.hpp"

namespace ffs3d {

namespace {

constexpr std::size_t kRecordBytes = 16;  // four float32 per point

static_assert(std::endian::native == std::endian::little,
              "velodyne parsing assumes a little-endian host");

float read_f32(const char* bytes) {
    float v;
    std::memcpy(&v, bytes, sizeof v);
    return v;
}

double parse_number(const std::string& token, const std::filesystem::path& path) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &consumed);
    } catch (const std::exception&) {
        throw FormatError("unparseable number '" + token + "' in " + path.string());
    }
    if (consumed != token.size())
        throw FormatError("unparseable number '" + token + "' in " + path.string());
    return v;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

GroundTruthObject parse_label_fields(const std::vector<std::string>& fields,
                                     const std::filesystem::path& path) {
    GroundTruthObject gt;
    gt.truncation = parse_number(fields[1], path);
    gt.occlusion = static_cast<int>(parse_number(fields[2], path));
    // fields[3] is the observation angle alpha; unused here but validated.
    parse_number(fields[3], path);
    gt.box2d.x_min = parse_number(fields[4], path);
    gt.box2d.y_min = parse_number(fields[5], path);
    gt.box2d.x_max = parse_number(fields[6], path);
    gt.box2d.y_max = parse_number(fields[7], path);
    gt.height = parse_number(fields[8], path);
    gt.width = parse_number(fields[9], path);
    gt.length = parse_number(fields[10], path);
    const double loc_x = parse_number(fields[11], path);
    const double loc_y = parse_number(fields[12], path);
    const double loc_z = parse_number(fields[13], path);
    gt.yaw = parse_number(fields[14], path);
    // KITTI stores the bottom-center of the 3D box; lift to the volumetric
    // center (camera y points down).
    gt.center = Point3{loc_x, loc_y - gt.height / 2.0, loc_z, 0.0};
    return gt;
}

}  // namespace

PointCloud load_point_cloud(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open point cloud file: " + path.string());

    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on: " + path.string());
    if (bytes.size() % kRecordBytes != 0)
        throw FormatError("point file length " + std::to_string(bytes.size()) +
                          " is not a multiple of 16: " + path.string());

    PointCloud cloud;
    cloud.frame = Frame::LIDAR;
    cloud.points.resize(bytes.size() / kRecordBytes);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const char* rec = bytes.data() + i * kRecordBytes;
        const float x = read_f32(rec);
        const float y = read_f32(rec + 4);
        const float z = read_f32(rec + 8);
        const float r = read_f32(rec + 12);
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(r))
            throw FormatError("non-finite value at record " + std::to_string(i) + " in " +
                              path.string());
        cloud.points[i] = Point3{x, y, z, r};
    }
    return cloud;
}

void save_point_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const Point3& p : cloud.points) {
        const float rec[4] = {static_cast<float>(p.x), static_cast<float>(p.y),
                              static_cast<float>(p.z), static_cast<float>(p.reflectance)};
        out.write(reinterpret_cast<const char*>(rec), sizeof rec);
    }
    out.flush();
    if (!out) throw IoError("write failure on: " + path.string());
}

CalibrationSet load_calibration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open calibration file: " + path.string());

    std::unordered_map<std::string, std::vector<double>> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const std::string key = line.substr(0, colon);
        std::vector<double> values;
        for (const std::string& tok : split_ws(line.substr(colon + 1)))
            values.push_back(parse_number(tok, path));
        entries[key] = std::move(values);
    }

    auto require = [&](const std::string& key, std::size_t n) -> const std::vector<double>& {
        auto it = entries.find(key);
        if (it == entries.end())
            throw FormatError("missing key '" + key + "' in " + path.string());
        if (it->second.size() != n)
            throw FormatError("key '" + key + "' has " + std::to_string(it->second.size()) +
                              " values, expected " + std::to_string(n) + " in " + path.string());
        return it->second;
    };

    CalibrationSet calib;
    const auto& p2 = require("P2", 12);
    const auto& r0 = require("R0_rect", 9);
    const auto& tr = require("Tr_velo_to_cam", 12);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) calib.P2(r, c) = p2[r * 4 + c];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) calib.R0_rect(r, c) = r0[r * 3 + c];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) calib.Tr_velo_to_cam(r, c) = tr[r * 4 + c];

    constexpr double kOrthoTol = 1e-3;
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const double dot = calib.R0_rect.row(i).dot(calib.R0_rect.row(j));
            const double expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - expected) > kOrthoTol)
                throw ValidationError("R0_rect is not orthonormal (rows " + std::to_string(i) +
                                      "," + std::to_string(j) + " dot " + std::to_string(dot) +
                                      ") in " + path.string());
        }
    }
    if (calib.P2(0, 0) <= 0.0 || calib.P2(1, 1) <= 0.0)
        throw ValidationError("P2 focal lengths must be positive in " + path.string());
    return calib;
}

std::vector<GroundTruthObject> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label file: " + path.string());

    std::vector<GroundTruthObject> objects;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 15)
            throw FormatError("label line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected 15: " +
                              path.string());
        const auto label = class_from_string(fields[0]);
        if (!label) continue;  // DontCare, Van, Truck, ...
        GroundTruthObject gt = parse_label_fields(fields, path);
        gt.class_label = *label;
        gt.box2d.class_label = *label;
        objects.push_back(std::move(gt));
    }
    return objects;
}

std::vector<Box2D> load_detections(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detection file: " + path.string());

    std::vector<Box2D> boxes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 15 && fields.size() != 16)
            throw FormatError("detection line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected 15 or 16: " +
                              path.string());
        const auto label = class_from_string(fields[0]);
        if (!label) continue;
        GroundTruthObject gt = parse_label_fields(fields, path);
        Box2D box = gt.box2d;
        box.class_label = *label;
        if (fields.size() == 16) box.score = parse_number(fields[15], path);
        boxes.push_back(box);
    }
    return boxes;
}

PointCloud velo_to_rect(const PointCloud& cloud, const CalibrationSet& calib) {
    if (cloud.frame != Frame::LIDAR)
        throw FrameError("velo_to_rect expects a LIDAR-frame cloud");

    // p' = R0_rect * (Tr * [p; 1])
    const Eigen::Matrix3d rot = calib.R0_rect * calib.Tr_velo_to_cam.leftCols<3>();
    const Eigen::Vector3d trans = calib.R0_rect * calib.Tr_velo_to_cam.col(3);

    PointCloud out;
    out.frame = Frame::RECT_CAM;
    out.points.resize(cloud.points.size());
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Eigen::Vector3d q = rot * cloud.points[i].vec3() + trans;
        out.points[i] = Point3{q.x(), q.y(), q.z(), cloud.points[i].reflectance};
    }
    return out;
}

}  // namespace ffs3d
