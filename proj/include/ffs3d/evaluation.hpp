#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ffs3d/heuristic.hpp"
#include "ffs3d/types.hpp"

namespace ffs3d {

// Which operator places the RoI window.
enum class ConstraintMode { FfsPeak, GtCenter };

// One evaluated ground-truth object.
struct EvalRecord {
    std::string frame_id;
    int object_id = 0;
    ClassLabel class_label = ClassLabel::Car;
    Difficulty difficulty = Difficulty::Unknown;
    double c_pred = 0.0;          // center chosen by the heuristic
    double c_gt = 0.0;            // axis coordinate of the gt volumetric center
    double axial_error = 0.0;     // |c_pred - c_gt|
    double euclidean_error = 0.0; // |RoI axis midpoint - gt center| in 3D
    bool contained = false;       // c_gt inside [near_c, far_c]
    std::uint64_t points_before = 0;
    std::uint64_t points_after = 0;
    bool fallback = false;
};

struct TimingSummary {
    std::size_t samples = 0;
    double mean_us = 0.0;
    double median_us = 0.0;
    double p95_us = 0.0;
    double points_per_second = 0.0;
};

struct ClassAggregate {
    std::size_t records = 0;
    std::size_t fallbacks = 0;
    double rmse = 0.0;            // axial, over non-fallback records; NaN if none
    double rmse_euclidean = 0.0;  // 3D midpoint error, same population
};

struct EvalReport {
    std::vector<ClassAggregate> per_class;       // indexed by ClassLabel
    std::vector<ClassAggregate> per_difficulty;  // indexed by Difficulty
    ClassAggregate ped_cyc_pooled;               // Pedestrian + Cyclist together
    ClassAggregate overall;
    double containment_rate = 0.0;          // over all records
    double mean_reduction_ratio = 0.0;      // mean(1 - after/before), before > 0
    std::size_t total_records = 0;
    std::size_t total_fallbacks = 0;
    std::optional<TimingSummary> timing;    // only filled by bench runs
};

// A ground-truth object with its frustum geometry resolved, ready to be
// re-evaluated under many parameter settings without touching the cloud.
struct PreparedObject {
    std::string frame_id;
    int object_id = 0;
    ClassLabel class_label = ClassLabel::Car;
    Difficulty difficulty = Difficulty::Unknown;
    Frustum frustum;
    FrustumSelection selection;
    Point3 gt_center;
    double c_gt = 0.0;
};

// Lifts every ground-truth box of one frame into a frustum and selects its
// points. `cloud` may be in either frame; LIDAR clouds are transformed first.
// `box_dilation_px` grows each 2D box before lifting.
std::vector<PreparedObject> prepare_frame(const std::string& frame_id, const PointCloud& cloud,
                                          const CalibrationSet& calib,
                                          const std::vector<GroundTruthObject>& gts,
                                          double far_plane, double box_dilation_px = 0.0);

// Runs the constraint on one prepared object and fills an EvalRecord.
EvalRecord evaluate_object(const PreparedObject& obj, const HeuristicParams& params,
                           ConstraintMode mode = ConstraintMode::FfsPeak);

// Evaluates every ground-truth object of a frame (the gt 2D boxes stand in
// for detector output).
std::vector<EvalRecord> evaluate_frame(const std::string& frame_id, const PointCloud& cloud,
                                       const CalibrationSet& calib,
                                       const std::vector<GroundTruthObject>& gts,
                                       const HeuristicParams& params,
                                       ConstraintMode mode = ConstraintMode::FfsPeak,
                                       double box_dilation_px = 0.0);

// Folds records into per-class RMSE, containment rate and reduction ratio.
// Metrics without a population come back as NaN.
EvalReport aggregate(const std::vector<EvalRecord>& records);

struct GridCell {
    HeuristicParams params;
    EvalReport report;
    std::size_t record_count = 0;
    bool failed = false;
    std::string error;
};

// Exhaustive Cartesian sweep over (bin_length, neighbor_bins, weight) at a
// fixed RoI length. Cells are sorted by overall RMSE ascending, ties by
// lexicographic (bin_length, neighbor_bins, weight). A failing cell records
// its error instead of aborting the sweep.
std::vector<GridCell> grid_search(const std::vector<PreparedObject>& objects,
                                  const std::vector<double>& bin_lengths,
                                  const std::vector<int>& neighbor_bins_values,
                                  const std::vector<double>& w_values, double h,
                                  double far_plane);

// Wall-clock latency of run_ffs_on_selection per prepared object, excluding
// any file I/O. One warm-up pass runs first and is excluded from the
// statistics; `repetitions` timed passes follow.
TimingSummary bench(const std::vector<PreparedObject>& objects, const HeuristicParams& params,
                    int repetitions);

}  // namespace ffs3d
