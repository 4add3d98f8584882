#pragma once

#include <string>

#include "dscm/estimate.hpp"

// Serialized estimate report (the leaf-to-hub handoff format).
namespace dscm {

std::string report_to_json(const EstimateReport& report);
EstimateReport report_from_json(const std::string& text);

void write_report(const std::string& path, const EstimateReport& report);
EstimateReport read_report(const std::string& path);

} // namespace dscm
