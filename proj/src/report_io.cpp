#include "ffs3d/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace ffs3d {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json params_to_json(const HeuristicParams& params) {
    return json{{"bin_length", params.bin_length},
                {"neighbor_bins", params.neighbor_bins},
                {"weight", params.weight},
                {"roi_length", params.roi_length},
                {"far_plane", params.far_plane}};
}

json record_to_json(const EvalRecord& rec) {
    return json{{"frame_id", rec.frame_id},
                {"object_id", rec.object_id},
                {"class", to_string(rec.class_label)},
                {"difficulty", to_string(rec.difficulty)},
                {"c_pred", rec.c_pred},
                {"c_gt", rec.c_gt},
                {"axial_error", rec.axial_error},
                {"euclidean_error", rec.euclidean_error},
                {"contained", rec.contained},
                {"points_before", rec.points_before},
                {"points_after", rec.points_after},
                {"fallback", rec.fallback}};
}

namespace {

json aggregate_to_json(const ClassAggregate& agg) {
    return json{{"records", agg.records},
                {"fallbacks", agg.fallbacks},
                {"rmse", agg.rmse},
                {"rmse_euclidean", agg.rmse_euclidean}};
}

}  // namespace

json timing_to_json(const TimingSummary& timing) {
    return json{{"samples", timing.samples},
                {"mean_us", timing.mean_us},
                {"median_us", timing.median_us},
                {"p95_us", timing.p95_us},
                {"points_per_second", timing.points_per_second}};
}

json report_to_json(const EvalReport& report) {
    json per_class;
    per_class["Car"] = aggregate_to_json(report.per_class[0]);
    per_class["Pedestrian"] = aggregate_to_json(report.per_class[1]);
    per_class["Cyclist"] = aggregate_to_json(report.per_class[2]);

    json per_difficulty;
    if (report.per_difficulty.size() == 4) {
        per_difficulty["Easy"] = aggregate_to_json(report.per_difficulty[0]);
        per_difficulty["Moderate"] = aggregate_to_json(report.per_difficulty[1]);
        per_difficulty["Hard"] = aggregate_to_json(report.per_difficulty[2]);
        per_difficulty["Unknown"] = aggregate_to_json(report.per_difficulty[3]);
    }

    json j{{"per_class", per_class},
           {"per_difficulty", per_difficulty},
           {"pedestrian_cyclist_pooled", aggregate_to_json(report.ped_cyc_pooled)},
           {"overall", aggregate_to_json(report.overall)},
           {"containment_rate", report.containment_rate},
           {"mean_reduction_ratio", report.mean_reduction_ratio},
           {"total_records", report.total_records},
           {"total_fallbacks", report.total_fallbacks},
           // The axial RMSE depends only on where the peak lands, never on
           // the RoI length; containment and reduction do depend on it.
           {"rmse_note", "axial RMSE is independent of roi_length"}};
    if (report.timing) j["timing"] = timing_to_json(*report.timing);
    return j;
}

std::string report_document_json(const HeuristicParams& params,
                                 const std::vector<EvalRecord>& records,
                                 const EvalReport& report) {
    json doc{{"params", params_to_json(params)}, {"aggregates", report_to_json(report)}};
    json recs = json::array();
    for (const EvalRecord& rec : records) recs.push_back(record_to_json(rec));
    doc["records"] = std::move(recs);
    return doc.dump(2) + "\n";
}

std::string report_document_csv(const std::vector<EvalRecord>& records) {
    std::ostringstream out;
    out << "frame_id,object_id,class,difficulty,c_pred,c_gt,axial_error,euclidean_error,"
           "contained,points_before,points_after,fallback\n";
    for (const EvalRecord& rec : records) {
        out << rec.frame_id << ',' << rec.object_id << ',' << to_string(rec.class_label) << ','
            << to_string(rec.difficulty) << ',' << format_double(rec.c_pred) << ','
            << format_double(rec.c_gt) << ',' << format_double(rec.axial_error) << ','
            << format_double(rec.euclidean_error) << ',' << (rec.contained ? 1 : 0) << ','
            << rec.points_before << ',' << rec.points_after << ',' << (rec.fallback ? 1 : 0)
            << '\n';
    }
    return out.str();
}

std::string grid_document_json(const std::vector<GridCell>& cells) {
    json rows = json::array();
    for (const GridCell& cell : cells) {
        json row{{"params", params_to_json(cell.params)},
                 {"records", cell.record_count},
                 {"failed", cell.failed}};
        if (cell.failed) {
            row["error"] = cell.error;
        } else {
            row["aggregates"] = report_to_json(cell.report);
        }
        rows.push_back(std::move(row));
    }
    return json{{"cells", rows}}.dump(2) + "\n";
}

std::string grid_document_csv(const std::vector<GridCell>& cells) {
    std::ostringstream out;
    out << "bin_length,neighbor_bins,weight,roi_length,far_plane,records,fallbacks,"
           "rmse_overall,rmse_car,rmse_pedestrian,rmse_cyclist,rmse_ped_cyc,"
           "containment_rate,mean_reduction_ratio,status\n";
    for (const GridCell& cell : cells) {
        const auto& p = cell.params;
        out << format_double(p.bin_length) << ',' << p.neighbor_bins << ','
            << format_double(p.weight) << ',' << format_double(p.roi_length) << ','
            << format_double(p.far_plane) << ',';
        if (cell.failed) {
            out << "0,0,nan,nan,nan,nan,nan,nan,nan,failed\n";
            continue;
        }
        const EvalReport& r = cell.report;
        out << r.total_records << ',' << r.total_fallbacks << ','
            << format_double(r.overall.rmse) << ',' << format_double(r.per_class[0].rmse) << ','
            << format_double(r.per_class[1].rmse) << ',' << format_double(r.per_class[2].rmse)
            << ',' << format_double(r.ped_cyc_pooled.rmse) << ','
            << format_double(r.containment_rate) << ','
            << format_double(r.mean_reduction_ratio) << ",ok\n";
    }
    return out.str();
}

}  // namespace ffs3d
