#pragma once

#include <cstdint>
#include <vector>

#include "ffs3d/frustum.hpp"
#include "ffs3d/types.hpp"

namespace ffs3d {

struct HeuristicParams {
    double bin_length = 0.75;   // meters, stride of the axis bins
    int neighbor_bins = 7;      // smear radius, bins on either side
    double weight = 1.0;        // contribution of a point to each neighbor bin
    double roi_length = 30.0;   // meters, axial extent h of the constrained RoI
    double far_plane = 70.0;    // meters, frustum range limit

    // Throws ValidationError if any field is out of range.
    void validate() const;
};

// Per-bin raw counts along the frustum axis plus the smeared totals.
// Counts stay integral; weights[i] = counts[i] + weight * (sum of counts in
// the neighbor_bins-wide window around i, edges truncated).
struct BinHistogram {
    double bin_length = 0.0;
    double near = 0.0;
    std::vector<std::uint64_t> counts;
    std::vector<double> weights;
    bool smeared = false;

    std::size_t num_bins() const { return counts.size(); }
    std::uint64_t total_count() const;
};

// A frustum restricted to the axis interval [c - h/2, c + h/2], clamped to
// [near, far] without re-centering.
struct ConstrainedRoI {
    Frustum frustum;
    double c = 0.0;       // peak-bin center distance from the frustum origin
    double near_c = 0.0;  // max(frustum.near, c - h/2)
    double far_c = 0.0;   // min(frustum.far, c + h/2)
    HeuristicParams params;

    double span() const { return far_c - near_c; }
    bool contains(double axis_coord) const {
        return axis_coord >= near_c && axis_coord <= far_c;
    }
};

// Bins the selection along the frustum axis: a point at axis coordinate t
// lands in bin floor((t - near) / bin_length), clamped to the last bin when
// t == far exactly. num_bins = ceil((far - near) / bin_length). Weights are
// initialized equal to the counts; the histogram is unsmeared.
BinHistogram build_histogram(const FrustumSelection& selection, const Frustum& frustum,
                             const HeuristicParams& params);

// Adds weight * (window count sum) to every bin. Each point contributes 1 to
// its parent bin and `weight` to up to neighbor_bins bins on either side;
// bins beyond the histogram edges neither give nor receive. Counts are left
// untouched. Throws SmearTwiceError if the histogram is already smeared.
BinHistogram smear_weights(const BinHistogram& hist, const HeuristicParams& params);

struct PeakBin {
    std::size_t bin_index = 0;
    double c = 0.0;  // near + (bin_index + 0.5) * bin_length
};

// Argmax over the smeared weights; ties resolve to the smallest index (the
// bin nearest the camera). Throws EmptyFrustumError when the histogram holds
// no points.
PeakBin peak_bin(const BinHistogram& hist);

// Restricts the frustum to [c - h/2, c + h/2], clamping each end to
// [near, far] independently. Throws InvalidCenterError if c lies outside
// [near, far].
ConstrainedRoI constrain_roi(const Frustum& frustum, double c, double h,
                             const HeuristicParams& params);

// Keeps exactly the selection entries whose axis coordinate falls inside
// [near_c, far_c], preserving order.
FrustumSelection filter_points(const ConstrainedRoI& roi, const FrustumSelection& selection);

struct FfsResult {
    ConstrainedRoI roi;
    FrustumSelection selection;     // points inside the constrained RoI
    std::size_t points_before = 0;  // points in the unconstrained frustum
    bool fallback = false;          // empty frustum: RoI spans [near, far]
};

// The full pipeline: build_frustum -> select_frustum_points ->
// build_histogram -> smear_weights -> peak_bin -> constrain_roi ->
// filter_points. An empty frustum yields the unconstrained RoI
// (c = midpoint) with the fallback flag set instead of an error.
FfsResult run_ffs(const PointCloud& cloud, const Box2D& box, const CalibrationSet& calib,
                  const HeuristicParams& params);

// Same as run_ffs but on a precomputed frustum + selection. Lets callers
// reuse one selection across many parameter settings.
FfsResult run_ffs_on_selection(const Frustum& frustum, const FrustumSelection& selection,
                               const HeuristicParams& params);

// Baseline constraint: centers the RoI window on the ground-truth object
// center instead of the density peak. Throws InvalidCenterError if the
// center projects outside [near, far] along the axis.
ConstrainedRoI ground_truth_constrain(const GroundTruthObject& gt, const Frustum& frustum,
                                      double h, const HeuristicParams& params);

}  // namespace ffs3d
