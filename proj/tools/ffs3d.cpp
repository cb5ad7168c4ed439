#include <CLI11.hpp>
#include <json.hpp>

#if __has_include(<malloc.h>)
#include <malloc.h>
#define FFS3D_HAVE_MALLOPT 1
#endif

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ffs3d/dataset.hpp"
#include "ffs3d/errors.hpp"
#include "ffs3d/evaluation.hpp"
#include "ffs3d/heuristic.hpp"
#include "ffs3d/kitti_io.hpp"
#include "ffs3d/report_io.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
    std::string data_root;
    std::string split_file;
    std::vector<std::string> classes = {"Car", "Pedestrian", "Cyclist"};
    ffs3d::HeuristicParams params;
    double box_dilation = 0.0;
    std::string output;
    std::string format = "json";
    std::string baseline = "ffs";
    int parallelism = 1;
};

// Parses "a,b,c" lists and "start:step:stop" ranges (stop inclusive).
std::vector<double> parse_range(const std::string& spec) {
    std::vector<double> values;
    if (spec.find(':') != std::string::npos) {
        double start = 0, step = 0, stop = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(spec);
        if (!(is >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' ||
            !(is >> std::ws).eof() || step <= 0)
            throw ffs3d::ValidationError("bad range spec '" + spec + "' (want start:step:stop)");
        for (int i = 0;; ++i) {
            const double v = start + i * step;
            if (v > stop + step * 1e-9) break;
            values.push_back(v);
        }
    } else {
        std::istringstream is(spec);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) continue;
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size())
                throw ffs3d::ValidationError("bad number '" + tok + "' in '" + spec + "'");
            values.push_back(v);
        }
    }
    if (values.empty()) throw ffs3d::ValidationError("empty range spec '" + spec + "'");
    return values;
}

std::vector<int> parse_int_range(const std::string& spec) {
    std::vector<int> values;
    for (double v : parse_range(spec)) values.push_back(static_cast<int>(std::llround(v)));
    return values;
}

std::vector<ffs3d::GroundTruthObject> filter_classes(
    const std::vector<ffs3d::GroundTruthObject>& gts, const std::vector<std::string>& classes) {
    std::vector<ffs3d::GroundTruthObject> out;
    for (const auto& gt : gts) {
        const std::string name = ffs3d::to_string(gt.class_label);
        for (const auto& wanted : classes) {
            if (name == wanted) {
                out.push_back(gt);
                break;
            }
        }
    }
    return out;
}

// Runs fn(0..n-1) on `workers` threads. Callers write results into
// preallocated slots, so output order never depends on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::min<int>(workers, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ffs3d::IoError("cannot open output file: " + path);
    out << text;
    out.flush();
    if (!out) throw ffs3d::IoError("write failure on: " + path);
}

void emit(const RunConfig& config, const std::string& text) {
    if (config.output.empty()) {
        std::cout << text;
    } else {
        write_text_file(config.output, text);
    }
}

struct FrameOutcome {
    std::vector<ffs3d::EvalRecord> records;
    std::vector<ffs3d::PreparedObject> objects;
    bool failed = false;
    std::string error;
};

// Loads and evaluates every frame of the split. Per-frame failures are
// reported on stderr and counted; only a fully failing run is fatal.
std::vector<FrameOutcome> run_split(const RunConfig& config, bool keep_objects,
                                    ffs3d::ConstraintMode mode) {
    const auto frames = ffs3d::list_split(config.data_root, config.split_file);
    std::vector<FrameOutcome> outcomes(frames.size());

    parallel_for(frames.size(), config.parallelism, [&](std::size_t i) {
        FrameOutcome& outcome = outcomes[i];
        try {
            const ffs3d::FrameData frame = ffs3d::load_frame(frames[i]);
            const auto gts = filter_classes(frame.labels, config.classes);
            auto objects = ffs3d::prepare_frame(frame.frame_id, frame.cloud, frame.calib, gts,
                                                config.params.far_plane, config.box_dilation);
            outcome.records.reserve(objects.size());
            for (const auto& obj : objects)
                outcome.records.push_back(ffs3d::evaluate_object(obj, config.params, mode));
            if (keep_objects) outcome.objects = std::move(objects);
        } catch (const std::exception& e) {
            outcome.failed = true;
            outcome.error = e.what();
        }
    });

    std::size_t failures = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (outcomes[i].failed) {
            ++failures;
            std::cerr << "frame " << frames[i].frame_id << " failed: " << outcomes[i].error
                      << "\n";
        }
    }
    if (!frames.empty() && failures == frames.size())
        throw ffs3d::Error("all " + std::to_string(failures) + " frames failed");
    return outcomes;
}

// The artifact owns stdout when --output is omitted; the human-readable
// summary moves to stderr so the artifact stays parseable.
std::ostream& summary_stream(const RunConfig& config) {
    return config.output.empty() ? std::cerr : std::cout;
}

void print_summary(const RunConfig& config, const ffs3d::EvalReport& report) {
    std::ostream& os = summary_stream(config);
    auto line = [&os](const std::string& name, const ffs3d::ClassAggregate& agg) {
        os << name << " RMSE: " << ffs3d::format_double(agg.rmse) << " m  (records "
           << agg.records << ", fallbacks " << agg.fallbacks << ")\n";
    };
    line("Car", report.per_class[0]);
    line("Pedestrian", report.per_class[1]);
    line("Cyclist", report.per_class[2]);
    line("Pedestrian+Cyclist", report.ped_cyc_pooled);
    os << "containment rate: " << ffs3d::format_double(report.containment_rate)
       << "  mean reduction: " << ffs3d::format_double(report.mean_reduction_ratio) << "\n";
}

int cmd_constrain(const RunConfig& config, const std::string& frame_id,
                  const std::string& box_spec, const std::string& class_name,
                  bool emit_indices) {
    const auto values = parse_range(box_spec);
    if (values.size() != 4)
        throw ffs3d::ValidationError("--box expects x_min,y_min,x_max,y_max");
    ffs3d::Box2D box;
    box.x_min = values[0];
    box.y_min = values[1];
    box.x_max = values[2];
    box.y_max = values[3];
    if (auto label = ffs3d::class_from_string(class_name)) box.class_label = *label;

    const std::filesystem::path root(config.data_root);
    const auto cloud = ffs3d::load_point_cloud(root / "velodyne" / (frame_id + ".bin"));
    const auto calib = ffs3d::load_calibration(root / "calib" / (frame_id + ".txt"));
    const auto rect = ffs3d::velo_to_rect(cloud, calib);

    const ffs3d::FfsResult result =
        ffs3d::run_ffs(rect, ffs3d::dilated(box, config.box_dilation), calib, config.params);

    json doc{{"c", result.roi.c},
             {"near", result.roi.near_c},
             {"far", result.roi.far_c},
             {"points_before", result.points_before},
             {"points_after", result.selection.size()},
             {"fallback", result.fallback}};
    if (emit_indices) doc["indices"] = result.selection.indices;
    emit(config, doc.dump(2) + "\n");
    return 0;
}

int cmd_evaluate(const RunConfig& config) {
    const ffs3d::ConstraintMode mode = config.baseline == "gt-center"
                                         ? ffs3d::ConstraintMode::GtCenter
                                         : ffs3d::ConstraintMode::FfsPeak;
    const auto outcomes = run_split(config, false, mode);

    std::vector<ffs3d::EvalRecord> records;
    for (const auto& outcome : outcomes)
        records.insert(records.end(), outcome.records.begin(), outcome.records.end());
    const ffs3d::EvalReport report = ffs3d::aggregate(records);

    if (config.format == "csv") {
        emit(config, ffs3d::report_document_csv(records));
    } else {
        emit(config, ffs3d::report_document_json(config.params, records, report));
    }
    print_summary(config, report);
    return 0;
}

int cmd_gridsearch(const RunConfig& config, const std::string& bin_spec,
                   const std::string& nb_spec, const std::string& w_spec,
                   const std::string& h_spec) {
    const auto bin_lengths = parse_range(bin_spec);
    const auto neighbor_bins = parse_int_range(nb_spec);
    const auto weights = parse_range(w_spec);
    const auto roi_lengths = parse_range(h_spec);
    for (double bl : bin_lengths)
        if (bl <= 0.0) throw ffs3d::ValidationError("bin lengths must be positive");
    for (int nb : neighbor_bins)
        if (nb < 0) throw ffs3d::ValidationError("neighbor bins must be >= 0");
    for (double h : roi_lengths)
        if (h <= 0.0) throw ffs3d::ValidationError("roi lengths must be positive");

    const auto outcomes = run_split(config, true, ffs3d::ConstraintMode::FfsPeak);
    std::vector<ffs3d::PreparedObject> objects;
    for (const auto& outcome : outcomes)
        objects.insert(objects.end(), outcome.objects.begin(), outcome.objects.end());

    std::vector<ffs3d::GridCell> cells;
    for (double h : roi_lengths) {
        auto sweep = ffs3d::grid_search(objects, bin_lengths, neighbor_bins, weights, h,
                                        config.params.far_plane);
        cells.insert(cells.end(), std::make_move_iterator(sweep.begin()),
                     std::make_move_iterator(sweep.end()));
    }
    if (roi_lengths.size() > 1) {
        // Re-sort the merged sweeps with the same key grid_search uses,
        // extended by the RoI length for ties.
        auto key = [](const ffs3d::GridCell& cell) {
            const double rmse = cell.report.overall.rmse;
            const bool usable = !cell.failed && std::isfinite(rmse);
            return std::make_tuple(cell.failed ? 1 : 0, usable ? 0 : 1, usable ? rmse : 0.0,
                                   cell.params.bin_length, cell.params.neighbor_bins,
                                   cell.params.weight, cell.params.roi_length);
        };
        std::stable_sort(cells.begin(), cells.end(),
                         [&](const auto& a, const auto& b) { return key(a) < key(b); });
    }

    if (config.format == "csv") {
        emit(config, ffs3d::grid_document_csv(cells));
    } else {
        emit(config, ffs3d::grid_document_json(cells));
    }
    summary_stream(config) << "grid cells: " << cells.size() << " over " << objects.size()
                           << " objects\n";
    return 0;
}

int cmd_bench(const RunConfig& config, int repetitions) {
    if (repetitions < 1) throw ffs3d::ValidationError("--repetitions must be >= 1");
    const auto outcomes = run_split(config, true, ffs3d::ConstraintMode::FfsPeak);
    std::vector<ffs3d::PreparedObject> objects;
    for (const auto& outcome : outcomes)
        objects.insert(objects.end(), outcome.objects.begin(), outcome.objects.end());

    const ffs3d::TimingSummary timing = ffs3d::bench(objects, config.params, repetitions);
    emit(config, ffs3d::timing_to_json(timing).dump(2) + "\n");
    summary_stream(config) << "bench: " << timing.samples << " samples, mean "
                           << ffs3d::format_double(timing.mean_us) << " us, p95 "
                           << ffs3d::format_double(timing.p95_us) << " us\n";
    return 0;
}

void add_io_options(CLI::App* cmd, RunConfig& config, bool needs_split) {
    cmd->add_option("--data-root", config.data_root,
                    "KITTI-style directory (velodyne/, calib/, label_2/)")
        ->envname("FFS_DATA_ROOT")
        ->required();
    if (needs_split)
        cmd->add_option("--split", config.split_file, "frame-id list, one per line")->required();
    cmd->add_option("--classes", config.classes, "classes to evaluate")->delimiter(',');
    cmd->add_option("--far-plane", config.params.far_plane, "frustum range limit in meters")
        ->capture_default_str();
    cmd->add_option("--box-dilation", config.box_dilation,
                    "grow 2D boxes by this many pixels before lifting")
        ->capture_default_str();
    cmd->add_option("--output", config.output, "artifact path (stdout when omitted)");
    cmd->add_option("--format", config.format, "artifact format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--parallelism", config.parallelism, "worker threads over frames")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

// Single-value heuristic knobs; gridsearch replaces these with sweep specs.
void add_param_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--bin-length", config.params.bin_length, "axis bin stride in meters")
        ->capture_default_str();
    cmd->add_option("--neighbor-bins", config.params.neighbor_bins,
                    "smear radius in bins on either side")
        ->capture_default_str();
    cmd->add_option("--weight", config.params.weight, "per-neighbor weight contribution")
        ->capture_default_str();
    cmd->add_option("--roi-length", config.params.roi_length, "RoI window length h")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
#if FFS3D_HAVE_MALLOPT
    // Per-frustum selections allocate and free a few hundred KB each; keep
    // glibc from bouncing those buffers through mmap/munmap on every call.
    mallopt(M_MMAP_THRESHOLD, 64 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, 64 * 1024 * 1024);
#endif

    CLI::App app{"Frustum search-space reduction for LiDAR point clouds"};
    app.require_subcommand(1);

    RunConfig config;
    std::string frame_id, box_spec, class_name = "Car";
    bool emit_indices = false;
    std::string bin_spec = "0.75", nb_spec = "7", w_spec = "1.0", h_spec = "30";
    int repetitions = 5;

    auto* constrain = app.add_subcommand(
        "constrain", "constrain one frustum from a frame and a 2D box");
    add_io_options(constrain, config, false);
    add_param_options(constrain, config);
    constrain->add_option("--frame", frame_id, "frame id, e.g. 000123")->required();
    constrain->add_option("--box", box_spec, "2D box as x_min,y_min,x_max,y_max")->required();
    constrain->add_option("--class", class_name, "object class of the box");
    constrain->add_flag("--emit-indices", emit_indices, "include kept point indices");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a split against ground truth");
    add_io_options(evaluate, config, true);
    add_param_options(evaluate, config);
    evaluate->add_option("--baseline", config.baseline, "window placement")
        ->check(CLI::IsMember({"ffs", "gt-center"}))
        ->capture_default_str();

    auto* gridsearch = app.add_subcommand(
        "gridsearch", "sweep bin-length/neighbor-bins/weight/roi-length");
    add_io_options(gridsearch, config, true);
    gridsearch->add_option("--bin-length", bin_spec, "list or start:step:stop")
        ->capture_default_str();
    gridsearch->add_option("--neighbor-bins", nb_spec, "list or start:step:stop")
        ->capture_default_str();
    gridsearch->add_option("--weight", w_spec, "list or start:step:stop")
        ->capture_default_str();
    gridsearch->add_option("--roi-length", h_spec, "list or start:step:stop")
        ->capture_default_str();

    auto* bench = app.add_subcommand("bench", "time the heuristic over a split");
    add_io_options(bench, config, true);
    add_param_options(bench, config);
    bench->add_option("--repetitions", repetitions, "timed passes after one warm-up")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        config.params.validate();
        if (constrain->parsed())
            return cmd_constrain(config, frame_id, box_spec, class_name, emit_indices);
        if (evaluate->parsed()) return cmd_evaluate(config);
        if (gridsearch->parsed())
            return cmd_gridsearch(config, bin_spec, nb_spec, w_spec, h_spec);
        if (bench->parsed()) return cmd_bench(config, repetitions);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
