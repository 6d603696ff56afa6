#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "defectscope/analysis.hpp"

namespace dscope {

struct ManifestEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string kind;  // dc_chart | summary_chart | route_chart | recommendations
};

struct ReportBundle {
  std::filesystem::path dir;
  std::vector<ManifestEntry> entries;
};

// 800x300 SVG for one characteristic: observed-range axis with 5 labeled
// ticks, a baseline band, and shaded failure/success value ranges. Output
// bytes are deterministic for identical input.
std::string render_dc_chart(const std::string& dc_name, double importance,
                            const std::vector<std::pair<double, double>>& failure_ranges,
                            const std::vector<std::pair<double, double>>& success_ranges,
                            std::pair<double, double> range);

// Importance bar chart over all characteristics, descending.
std::string render_summary_chart(const DCSummary& summary);

// Top routes of both leaf classes as textual condition chains.
std::string render_routes_chart(const DCSummary& summary, const std::string& target_name);

// improvement_recommendations.txt: one block per top-5 characteristic by
// importance (ties follow feature_list order). Returns the file path.
std::filesystem::path write_recommendations(const DCSummary& summary,
                                            const std::string& target_name,
                                            const std::filesystem::path& out_dir);

// Renders the full bundle for one reasoning target into out_dir:
// dc_<name>.svg per characteristic, summary.svg, improvement_recommendations.txt,
// and routes.svg when route_plot is set.
ReportBundle explain_forest(const DCSummary& summary,
                            const std::vector<std::string>& feature_list,
                            const std::string& target_name,
                            const std::filesystem::path& out_dir, bool route_plot);

// Writes content to path via a temp file + rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dscope
