#pragma once

#include <string>
#include <vector>

#include "defectscope/features.hpp"
#include "defectscope/forest.hpp"

namespace dscope {

struct NodeAnalysis {
  int tree_id = 0;
  int node_id = 0;
  int depth = 0;
  int dc_index = -1;          // -1 for leaves
  double coverage = 0.0;      // weighted samples / tree root weight
  double gini_gain = 0.0;
  bool error_flag = false;    // split characteristic is one of error_features
  double importance = 0.0;    // coverage * gini_gain; 0 at leaves
};

// Scores every decision node of a climbed forest.
std::vector<NodeAnalysis> analyse_forest(const ClimbResult& climb,
                                         const std::vector<std::string>& error_features);

struct DCReport {
  std::string name;
  double importance = 0.0;  // normalized across characteristics, sums to 1
  double range_lo = 0.0;    // observed range (chart axis span)
  double range_hi = 1.0;
  std::vector<std::pair<double, double>> failure_ranges;
  std::vector<std::pair<double, double>> success_ranges;
};

struct DCSummary {
  std::vector<DCReport> per_dc;     // feature_list order
  std::vector<Route> route_to_1;
  std::vector<Route> route_to_0;
};

inline constexpr int kRangeBins = 64;

// Aggregates node importances per characteristic and derives the value
// intervals most associated with each leaf class. Route intervals deposit
// support*purity into 64 bins over the observed range; reported ranges are
// maximal bin runs holding at least half of the strongest bin's weight.
DCSummary summary_forest(const std::vector<NodeAnalysis>& analysed,
                         const std::vector<Route>& routes,
                         const std::vector<std::string>& feature_list,
                         const FeatureRange& ranges, int top_k = 5);

}  // namespace dscope
