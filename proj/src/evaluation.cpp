#include "ffs3d/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>

#include "ffs3d/errors.hpp"
#include "ffs3d/kitti_io.hpp"

namespace ffs3d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rmse_of(const std::vector<double>& squared_errors) {
    if (squared_errors.empty()) return kNaN;
    double sum = 0.0;
    for (double e : squared_errors) sum += e;
    return std::sqrt(sum / static_cast<double>(squared_errors.size()));
}

}  // namespace

std::vector<PreparedObject> prepare_frame(const std::string& frame_id, const PointCloud& cloud,
                                          const CalibrationSet& calib,
                                          const std::vector<GroundTruthObject>& gts,
                                          double far_plane, double box_dilation_px) {
    const PointCloud* rect = &cloud;
    PointCloud transformed;
    if (cloud.frame == Frame::LIDAR) {
        transformed = velo_to_rect(cloud, calib);
        rect = &transformed;
    }

    std::vector<PreparedObject> objects;
    objects.reserve(gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i) {
        const GroundTruthObject& gt = gts[i];
        PreparedObject obj;
        obj.frame_id = frame_id;
        obj.object_id = static_cast<int>(i);
        obj.class_label = gt.class_label;
        obj.difficulty = difficulty_of(gt);
        obj.frustum = build_frustum(dilated(gt.box2d, box_dilation_px), calib, far_plane);
        obj.selection = select_frustum_points(obj.frustum, *rect);
        obj.gt_center = gt.center;
        obj.c_gt = axis_coordinate(obj.frustum, gt.center);
        objects.push_back(std::move(obj));
    }
    return objects;
}

EvalRecord evaluate_object(const PreparedObject& obj, const HeuristicParams& params,
                           ConstraintMode mode) {
    EvalRecord rec;
    rec.frame_id = obj.frame_id;
    rec.object_id = obj.object_id;
    rec.class_label = obj.class_label;
    rec.difficulty = obj.difficulty;
    rec.c_gt = obj.c_gt;

    ConstrainedRoI roi;
    if (mode == ConstraintMode::GtCenter) {
        // Baseline: the window is centered on the true object center. The
        // point counts still come from the same frustum selection.
        const double c = std::clamp(obj.c_gt, obj.frustum.near, obj.frustum.far);
        roi = constrain_roi(obj.frustum, c, params.roi_length, params);
        rec.points_before = obj.selection.size();
        rec.points_after = filter_points(roi, obj.selection).size();
        rec.fallback = obj.selection.empty();
    } else {
        const FfsResult result = run_ffs_on_selection(obj.frustum, obj.selection, params);
        roi = result.roi;
        rec.points_before = result.points_before;
        rec.points_after = result.selection.size();
        rec.fallback = result.fallback;
    }

    rec.c_pred = roi.c;
    rec.axial_error = std::abs(rec.c_pred - rec.c_gt);
    rec.contained = roi.contains(rec.c_gt);
    const Eigen::Vector3d midpoint =
        roi.frustum.origin + 0.5 * (roi.near_c + roi.far_c) * roi.frustum.axis;
    rec.euclidean_error = (midpoint - obj.gt_center.vec3()).norm();
    return rec;
}

std::vector<EvalRecord> evaluate_frame(const std::string& frame_id, const PointCloud& cloud,
                                       const CalibrationSet& calib,
                                       const std::vector<GroundTruthObject>& gts,
                                       const HeuristicParams& params, ConstraintMode mode,
                                       double box_dilation_px) {
    params.validate();
    const auto objects =
        prepare_frame(frame_id, cloud, calib, gts, params.far_plane, box_dilation_px);
    std::vector<EvalRecord> records;
    records.reserve(objects.size());
    for (const PreparedObject& obj : objects)
        records.push_back(evaluate_object(obj, params, mode));
    return records;
}

EvalReport aggregate(const std::vector<EvalRecord>& records) {
    EvalReport report;
    report.per_class.assign(3, ClassAggregate{});
    report.per_difficulty.assign(4, ClassAggregate{});

    std::vector<std::vector<double>> sq_axial(3), sq_eucl(3), sq_axial_diff(4), sq_eucl_diff(4);
    std::vector<double> sq_axial_all, sq_eucl_all, sq_axial_pedcyc, sq_eucl_pedcyc;
    std::size_t contained = 0;
    double reduction_sum = 0.0;
    std::size_t reduction_n = 0;

    for (const EvalRecord& rec : records) {
        const auto cls = static_cast<std::size_t>(rec.class_label);
        const auto dif = static_cast<std::size_t>(rec.difficulty);
        ClassAggregate& agg = report.per_class[cls];
        ++agg.records;
        ++report.per_difficulty[dif].records;
        ++report.total_records;
        if (rec.fallback) {
            ++agg.fallbacks;
            ++report.per_difficulty[dif].fallbacks;
            ++report.total_fallbacks;
        } else {
            sq_axial[cls].push_back(rec.axial_error * rec.axial_error);
            sq_eucl[cls].push_back(rec.euclidean_error * rec.euclidean_error);
            sq_axial_diff[dif].push_back(rec.axial_error * rec.axial_error);
            sq_eucl_diff[dif].push_back(rec.euclidean_error * rec.euclidean_error);
            sq_axial_all.push_back(rec.axial_error * rec.axial_error);
            sq_eucl_all.push_back(rec.euclidean_error * rec.euclidean_error);
            if (rec.class_label != ClassLabel::Car) {
                sq_axial_pedcyc.push_back(rec.axial_error * rec.axial_error);
                sq_eucl_pedcyc.push_back(rec.euclidean_error * rec.euclidean_error);
            }
        }
        if (rec.contained) ++contained;
        if (rec.points_before > 0) {
            reduction_sum += 1.0 - static_cast<double>(rec.points_after) /
                                       static_cast<double>(rec.points_before);
            ++reduction_n;
        }
    }

    for (std::size_t cls = 0; cls < 3; ++cls) {
        report.per_class[cls].rmse = rmse_of(sq_axial[cls]);
        report.per_class[cls].rmse_euclidean = rmse_of(sq_eucl[cls]);
    }
    for (std::size_t dif = 0; dif < 4; ++dif) {
        report.per_difficulty[dif].rmse = rmse_of(sq_axial_diff[dif]);
        report.per_difficulty[dif].rmse_euclidean = rmse_of(sq_eucl_diff[dif]);
    }
    report.ped_cyc_pooled.records = report.per_class[1].records + report.per_class[2].records;
    report.ped_cyc_pooled.fallbacks =
        report.per_class[1].fallbacks + report.per_class[2].fallbacks;
    report.ped_cyc_pooled.rmse = rmse_of(sq_axial_pedcyc);
    report.ped_cyc_pooled.rmse_euclidean = rmse_of(sq_eucl_pedcyc);
    report.overall.records = report.total_records;
    report.overall.fallbacks = report.total_fallbacks;
    report.overall.rmse = rmse_of(sq_axial_all);
    report.overall.rmse_euclidean = rmse_of(sq_eucl_all);
    report.containment_rate =
        records.empty() ? kNaN : static_cast<double>(contained) / static_cast<double>(records.size());
    report.mean_reduction_ratio =
        reduction_n == 0 ? kNaN : reduction_sum / static_cast<double>(reduction_n);
    return report;
}

std::vector<GridCell> grid_search(const std::vector<PreparedObject>& objects,
                                  const std::vector<double>& bin_lengths,
                                  const std::vector<int>& neighbor_bins_values,
                                  const std::vector<double>& w_values, double h,
                                  double far_plane) {
    std::vector<GridCell> cells;
    cells.reserve(bin_lengths.size() * neighbor_bins_values.size() * w_values.size());

    for (double bl : bin_lengths) {
        for (int nb : neighbor_bins_values) {
            for (double w : w_values) {
                GridCell cell;
                cell.params = HeuristicParams{bl, nb, w, h, far_plane};
                try {
                    cell.params.validate();
                    std::vector<EvalRecord> records;
                    records.reserve(objects.size());
                    for (const PreparedObject& obj : objects)
                        records.push_back(evaluate_object(obj, cell.params));
                    cell.report = aggregate(records);
                    cell.record_count = records.size();
                } catch (const std::exception& e) {
                    cell.failed = true;
                    cell.error = e.what();
                }
                cells.push_back(std::move(cell));
            }
        }
    }

    // Failed cells sink to the end; NaN RMSE (no usable records) sorts after
    // finite values.
    auto sort_key = [](const GridCell& cell) {
        const double rmse = cell.report.overall.rmse;
        const bool usable = !cell.failed && std::isfinite(rmse);
        return std::make_tuple(cell.failed ? 1 : 0, usable ? 0 : 1, usable ? rmse : 0.0,
                               cell.params.bin_length, cell.params.neighbor_bins,
                               cell.params.weight);
    };
    std::stable_sort(cells.begin(), cells.end(),
                     [&](const GridCell& a, const GridCell& b) { return sort_key(a) < sort_key(b); });
    return cells;
}

TimingSummary bench(const std::vector<PreparedObject>& objects, const HeuristicParams& params,
                    int repetitions) {
    params.validate();
    if (repetitions < 1) throw ValidationError("repetitions must be >= 1");

    using clock = std::chrono::steady_clock;
    std::vector<double> samples_us;
    samples_us.reserve(objects.size() * static_cast<std::size_t>(repetitions));
    std::uint64_t points_processed = 0;
    std::uint64_t sink = 0;  // keeps the optimizer from dropping the calls
    double total_us = 0.0;

    for (int pass = 0; pass <= repetitions; ++pass) {
        const bool warmup = pass == 0;
        for (const PreparedObject& obj : objects) {
            const auto t0 = clock::now();
            const FfsResult result = run_ffs_on_selection(obj.frustum, obj.selection, params);
            const auto t1 = clock::now();
            sink += result.selection.size() + (result.fallback ? 1 : 0);
            if (warmup) continue;
            const double us = std::chrono::duration<double, std::micro>(t1 - t0).count();
            samples_us.push_back(us);
            total_us += us;
            points_processed += obj.selection.size();
        }
    }

    TimingSummary summary;
    summary.samples = samples_us.size();
    if (sink == std::numeric_limits<std::uint64_t>::max() || samples_us.empty()) return summary;

    std::sort(samples_us.begin(), samples_us.end());
    summary.mean_us = total_us / static_cast<double>(samples_us.size());
    const std::size_t mid = samples_us.size() / 2;
    summary.median_us = samples_us.size() % 2 == 1
                            ? samples_us[mid]
                            : 0.5 * (samples_us[mid - 1] + samples_us[mid]);
    const auto p95_idx = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(samples_us.size()))) - 1;
    summary.p95_us = samples_us[std::min(p95_idx, samples_us.size() - 1)];
    summary.points_per_second =
        total_us > 0.0 ? static_cast<double>(points_processed) / (total_us * 1e-6) : 0.0;
    return summary;
}

}  // namespace ffs3d
