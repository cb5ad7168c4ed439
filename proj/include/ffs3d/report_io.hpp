#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "ffs3d/evaluation.hpp"

namespace ffs3d {

// Deterministic serialization of evaluation artifacts. Two runs over the
// same inputs produce byte-identical text; no timestamps or host names.

nlohmann::json params_to_json(const HeuristicParams& params);
nlohmann::json record_to_json(const EvalRecord& rec);
nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json timing_to_json(const TimingSummary& timing);

std::string report_document_json(const HeuristicParams& params,
                                 const std::vector<EvalRecord>& records,
                                 const EvalReport& report);
std::string report_document_csv(const std::vector<EvalRecord>& records);

std::string grid_document_json(const std::vector<GridCell>& cells);
std::string grid_document_csv(const std::vector<GridCell>& cells);

// Round-trip-exact decimal formatting used by every CSV column.
std::string format_double(double v);

}  // namespace ffs3d
