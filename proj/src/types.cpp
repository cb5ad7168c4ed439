#include "ffs3d/types.hpp"

namespace ffs3d {

const char* to_string(ClassLabel label) {
    switch (label) {
        case ClassLabel::Car: return "Car";
        case ClassLabel::Pedestrian: return "Pedestrian";
        case ClassLabel::Cyclist: return "Cyclist";
    }
    return "?";
}

std::optional<ClassLabel> class_from_string(const std::string& name) {
    if (name == "Car") return ClassLabel::Car;
    if (name == "Pedestrian") return ClassLabel::Pedestrian;
    if (name == "Cyclist") return ClassLabel::Cyclist;
    return std::nullopt;
}

CalibrationSet CalibrationSet::identity() {
    CalibrationSet c;
    c.P2.setZero();
    c.P2(0, 0) = c.P2(1, 1) = c.P2(2, 2) = 1.0;
    c.R0_rect.setIdentity();
    c.Tr_velo_to_cam.setZero();
    c.Tr_velo_to_cam(0, 0) = c.Tr_velo_to_cam(1, 1) = c.Tr_velo_to_cam(2, 2) = 1.0;
    return c;
}

Box2D dilated(const Box2D& box, double pixels) {
    Box2D out = box;
    out.x_min -= pixels;
    out.y_min -= pixels;
    out.x_max += pixels;
    out.y_max += pixels;
    return out;
}

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "Easy";
        case Difficulty::Moderate: return "Moderate";
        case Difficulty::Hard: return "Hard";
        case Difficulty::Unknown: return "Unknown";
    }
    return "?";
}

// Standard KITTI buckets: min box height 40/25/25 px, max occlusion 0/1/2,
// max truncation 0.15/0.30/0.50.
Difficulty difficulty_of(const GroundTruthObject& gt) {
    const double box_height = gt.box2d.height();
    if (box_height >= 40.0 && gt.occlusion <= 0 && gt.truncation <= 0.15)
        return Difficulty::Easy;
    if (box_height >= 25.0 && gt.occlusion <= 1 && gt.truncation <= 0.30)
        return Difficulty::Moderate;
    if (box_height >= 25.0 && gt.occlusion <= 2 && gt.truncation <= 0.50)
        return Difficulty::Hard;
    return Difficulty::Unknown;
}

}  // namespace ffs3d
