#pragma once

#include <string>

#include "json.hpp"

#include "misvqa/ansatz.hpp"
#include "misvqa/solver.hpp"

namespace misvqa {

/// kind, depth, lambda, initial state, per-layer order and masked nodes.
nlohmann::json plan_summary(const AnsatzPlan& plan);

nlohmann::json to_json(const RunRecord& rec);
RunRecord record_from_json(const nlohmann::json& j);

/// Flat CSV view of a record. Wall time is left out so reruns of an
/// exact-mode experiment produce identical bytes.
std::string csv_header();
std::string csv_row(const RunRecord& rec);

/// Shortest text that parses back to the same double.
std::string format_number(double v);

}  // namespace misvqa
