#include "ffs3d/heuristic.hpp"

#include <algorithm>
#include <cmath>

#include "ffs3d/errors.hpp"

namespace ffs3d {

void HeuristicParams::validate() const {
    if (!(bin_length > 0.0) || !std::isfinite(bin_length))
        throw ValidationError("bin_length must be positive");
    if (neighbor_bins < 0) throw ValidationError("neighbor_bins must be >= 0");
    if (!(weight >= 0.0) || !std::isfinite(weight))
        throw ValidationError("weight must be >= 0");
    if (!(roi_length > 0.0) || !std::isfinite(roi_length))
        throw ValidationError("roi_length must be positive");
    if (!(far_plane > 0.0) || !std::isfinite(far_plane))
        throw ValidationError("far_plane must be positive");
}

std::uint64_t BinHistogram::total_count() const {
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    return total;
}

BinHistogram build_histogram(const FrustumSelection& selection, const Frustum& frustum,
                             const HeuristicParams& params) {
    params.validate();

    BinHistogram hist;
    hist.bin_length = params.bin_length;
    hist.near = frustum.near;
    const auto num_bins = static_cast<std::size_t>(
        std::ceil((frustum.far - frustum.near) / params.bin_length));
    hist.counts.assign(num_bins, 0);

    for (double t : selection.axis_coords) {
        auto idx = static_cast<std::ptrdiff_t>(
            std::floor((t - frustum.near) / params.bin_length));
        // t == far lands one past the end; keep the closed interval.
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(num_bins) - 1);
        ++hist.counts[static_cast<std::size_t>(idx)];
    }

    hist.weights.assign(hist.counts.begin(), hist.counts.end());
    hist.smeared = false;
    return hist;
}

BinHistogram smear_weights(const BinHistogram& hist, const HeuristicParams& params) {
    if (hist.smeared) throw SmearTwiceError("histogram is already smeared");

    BinHistogram out = hist;
    const auto n = static_cast<std::ptrdiff_t>(hist.counts.size());
    const std::ptrdiff_t radius = params.neighbor_bins;
    const double w = params.weight;

    // Sliding integer window over [i - radius, i + radius]; the neighbor sum
    // stays exact, so the weight is a single multiply-add per bin and the
    // brute-force per-point recount reproduces it bit for bit.
    std::uint64_t window = 0;
    for (std::ptrdiff_t j = 0; j < std::min(radius + 1, n); ++j) window += hist.counts[j];
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (i > 0) {
            if (i + radius < n) window += hist.counts[i + radius];
            if (i - radius - 1 >= 0) window -= hist.counts[i - radius - 1];
        }
        const std::uint64_t neighbor_sum = window - hist.counts[i];
        out.weights[i] =
            static_cast<double>(hist.counts[i]) + w * static_cast<double>(neighbor_sum);
    }
    out.smeared = true;
    return out;
}

PeakBin peak_bin(const BinHistogram& hist) {
    if (hist.total_count() == 0)
        throw EmptyFrustumError("histogram holds no points");

    std::size_t best = 0;
    for (std::size_t i = 1; i < hist.weights.size(); ++i)
        if (hist.weights[i] > hist.weights[best]) best = i;  // ties keep the nearest bin
    return PeakBin{best, hist.near + (static_cast<double>(best) + 0.5) * hist.bin_length};
}

ConstrainedRoI constrain_roi(const Frustum& frustum, double c, double h,
                             const HeuristicParams& params) {
    if (!(h > 0.0)) throw ValidationError("roi length h must be positive");
    if (c < frustum.near || c > frustum.far)
        throw InvalidCenterError("center " + std::to_string(c) + " outside [" +
                                 std::to_string(frustum.near) + ", " +
                                 std::to_string(frustum.far) + "]");

    ConstrainedRoI roi;
    roi.frustum = frustum;
    roi.c = c;
    roi.near_c = std::max(frustum.near, c - h / 2.0);
    roi.far_c = std::min(frustum.far, c + h / 2.0);
    roi.params = params;
    return roi;
}

FrustumSelection filter_points(const ConstrainedRoI& roi, const FrustumSelection& selection) {
    FrustumSelection out;
    out.indices.reserve(selection.size());
    out.axis_coords.reserve(selection.size());
    for (std::size_t i = 0; i < selection.size(); ++i) {
        const double t = selection.axis_coords[i];
        if (roi.contains(t)) {
            out.indices.push_back(selection.indices[i]);
            out.axis_coords.push_back(t);
        }
    }
    return out;
}

FfsResult run_ffs_on_selection(const Frustum& frustum, const FrustumSelection& selection,
                               const HeuristicParams& params) {
    params.validate();

    FfsResult result;
    result.points_before = selection.size();

    if (selection.empty()) {
        result.roi.frustum = frustum;
        result.roi.c = 0.5 * (frustum.near + frustum.far);
        result.roi.near_c = frustum.near;
        result.roi.far_c = frustum.far;
        result.roi.params = params;
        result.fallback = true;
        return result;
    }

    const BinHistogram hist = smear_weights(build_histogram(selection, frustum, params), params);
    const PeakBin peak = peak_bin(hist);
    // The last bin may extend past the far plane, putting its center just
    // outside [near, far]; clamp so the window stays a valid RoI.
    const double c = std::min(peak.c, frustum.far);
    result.roi = constrain_roi(frustum, c, params.roi_length, params);
    result.selection = filter_points(result.roi, selection);
    return result;
}

FfsResult run_ffs(const PointCloud& cloud, const Box2D& box, const CalibrationSet& calib,
                  const HeuristicParams& params) {
    params.validate();
    const Frustum frustum = build_frustum(box, calib, params.far_plane);
    return run_ffs_on_selection(frustum, select_frustum_points(frustum, cloud), params);
}

ConstrainedRoI ground_truth_constrain(const GroundTruthObject& gt, const Frustum& frustum,
                                      double h, const HeuristicParams& params) {
    return constrain_roi(frustum, axis_coordinate(frustum, gt.center), h, params);
}

}  // namespace ffs3d
