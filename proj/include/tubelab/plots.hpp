#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tubelab {

/// Slope of the guide line drawn for a report tag (empty when no rate is claimed).
std::optional<double> guide_slope(const std::string& tag, double delta, double p = 0.9);

/// Self-contained matplotlib script for a report; the CSV is looked up next to the script.
std::string plot_script(const nlohmann::json& report, const std::string& csv_name);

/// Writes plot_<tag>.py next to each report.json. Throws "report-not-found".
std::vector<std::string> emit_plots(const std::vector<std::string>& report_paths);

}  // namespace tubelab
