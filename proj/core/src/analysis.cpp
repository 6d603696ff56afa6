#include "defectscope/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "defectscope/errors.hpp"

namespace dscope {

namespace {

double gini(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  const double p0 = w0 / w;
  const double p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

}  // namespace

std::vector<NodeAnalysis> analyse_forest(const ClimbResult& climb,
                                         const std::vector<std::string>& error_features) {
  // Node ids are per tree; build (tree, id) -> flat index for child lookup.
  std::map<std::pair<int, int>, std::size_t> index;
  std::map<int, double> root_weight;
  for (std::size_t i = 0; i < climb.nodes.size(); ++i) {
    const ParsedNode& n = climb.nodes[i];
    index[{n.tree_id, n.node_id}] = i;
    if (n.node_id == 0) root_weight[n.tree_id] = n.count0 + n.count1;
  }
  const std::set<std::string> error_set(error_features.begin(), error_features.end());

  std::vector<NodeAnalysis> out;
  out.reserve(climb.nodes.size());
  for (const ParsedNode& n : climb.nodes) {
    NodeAnalysis a;
    a.tree_id = n.tree_id;
    a.node_id = n.node_id;
    a.depth = n.depth;
    a.dc_index = n.dc_index;
    const double rw = root_weight[n.tree_id];
    const double w = n.count0 + n.count1;
    a.coverage = rw > 0.0 ? w / rw : 0.0;
    if (!n.is_leaf()) {
      const ParsedNode& l = climb.nodes[index.at({n.tree_id, n.left})];
      const ParsedNode& r = climb.nodes[index.at({n.tree_id, n.right})];
      const double lw = l.count0 + l.count1;
      const double rw2 = r.count0 + r.count1;
      a.gini_gain = gini(n.count0, n.count1) -
                    (lw * gini(l.count0, l.count1) + rw2 * gini(r.count0, r.count1)) / w;
      a.importance = a.coverage * a.gini_gain;
      a.error_flag = error_set.count(feature_names()[n.dc_index]) > 0;
    }
    out.push_back(a);
  }
  return out;
}

namespace {

// Clips a route's conditions on one characteristic to [lo, hi] within the
// observed range. Returns false when the route does not constrain it.
bool route_interval(const Route& route, const std::string& dc_name, double range_lo,
                    double range_hi, double& lo, double& hi) {
  lo = range_lo;
  hi = range_hi;
  bool constrained = false;
  for (const RouteCondition& c : route.conditions) {
    if (c.dc_name != dc_name) continue;
    constrained = true;
    if (c.greater) {
      lo = std::max(lo, c.threshold);
    } else {
      hi = std::min(hi, c.threshold);
    }
  }
  return constrained && lo <= hi;
}

std::vector<std::pair<double, double>> ranges_from_routes(
    const std::vector<Route>& routes, int leaf_class, const std::string& dc_name,
    double range_lo, double range_hi) {
  std::array<double, kRangeBins> bins{};
  const double span = range_hi - range_lo;
  bool any = false;
  for (const Route& route : routes) {
    if (route.leaf_class != leaf_class) continue;
    double lo;
    double hi;
    if (!route_interval(route, dc_name, range_lo, range_hi, lo, hi)) continue;
    any = true;
    const double weight = route.support * route.purity;
    int b0 = 0;
    int b1 = kRangeBins - 1;
    if (span > 0.0) {
      b0 = std::clamp(static_cast<int>((lo - range_lo) / span * kRangeBins), 0, kRangeBins - 1);
      b1 = std::clamp(static_cast<int>((hi - range_lo) / span * kRangeBins), 0, kRangeBins - 1);
    }
    for (int b = b0; b <= b1; ++b) bins[b] += weight;
  }
  if (!any) return {};

  const double max_weight = *std::max_element(bins.begin(), bins.end());
  if (max_weight <= 0.0) return {};
  const double cutoff = 0.5 * max_weight;
  const double bin_width = span / kRangeBins;

  std::vector<std::pair<double, double>> out;
  int run_start = -1;
  for (int b = 0; b <= kRangeBins; ++b) {
    const bool on = b < kRangeBins && bins[b] >= cutoff;
    if (on && run_start < 0) run_start = b;
    if (!on && run_start >= 0) {
      double lo = range_lo + run_start * bin_width;
      double hi = range_lo + b * bin_width;
      if (span == 0.0) {
        lo = range_lo;
        hi = range_hi;
      }
      out.emplace_back(lo, std::min(hi, range_hi));
      run_start = -1;
    }
  }
  return out;
}

}  // namespace

DCSummary summary_forest(const std::vector<NodeAnalysis>& analysed,
                         const std::vector<Route>& routes,
                         const std::vector<std::string>& feature_list,
                         const FeatureRange& ranges, int top_k) {
  if (analysed.empty()) raise(Errc::no_routes, "no analysed nodes");
  const bool any_split =
      std::any_of(analysed.begin(), analysed.end(), [](const NodeAnalysis& a) { return a.dc_index >= 0; });
  if (!any_split) raise(Errc::no_routes, "forest has no splits (all trees are single leaves)");

  DCSummary summary;
  std::vector<double> importance(feature_list.size(), 0.0);
  double total = 0.0;
  for (const NodeAnalysis& a : analysed) {
    if (a.dc_index >= 0) {
      importance[a.dc_index] += a.importance;
      total += a.importance;
    }
  }

  for (std::size_t f = 0; f < feature_list.size(); ++f) {
    DCReport report;
    report.name = feature_list[f];
    report.importance = total > 0.0 ? importance[f] / total : 0.0;
    const auto [lo, hi] = ranges.min_max[f];
    report.range_lo = lo;
    report.range_hi = hi;
    report.failure_ranges = ranges_from_routes(routes, 1, report.name, lo, hi);
    report.success_ranges = ranges_from_routes(routes, 0, report.name, lo, hi);
    summary.per_dc.push_back(std::move(report));
  }

  auto top_routes = [&](int leaf_class) {
    std::vector<Route> selected;
    for (const Route& r : routes) {
      if (r.leaf_class == leaf_class) selected.push_back(r);
    }
    std::sort(selected.begin(), selected.end(), [](const Route& a, const Route& b) {
      const double wa = a.support * a.purity;
      const double wb = b.support * b.purity;
      if (wa != wb) return wa > wb;
      if (a.tree_id != b.tree_id) return a.tree_id < b.tree_id;
      return a.leaf_node_id < b.leaf_node_id;
    });
    if (selected.size() > static_cast<std::size_t>(top_k)) selected.resize(top_k);
    return selected;
  };
  summary.route_to_1 = top_routes(1);
  summary.route_to_0 = top_routes(0);
  return summary;
}

}  // namespace dscope
