#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "defectscope/features.hpp"

namespace dscope {

struct ForestConfig {
  int n_tree = 200;
  int max_depth = 10;
  int min_samples_leaf = 2;
  int features_per_split = 5;  // ceil(sqrt(18))
  std::uint64_t seed = 7;
  bool balance_classes = true;
  double good_learned_threshold = 0.9;

  void validate() const;
};

struct TreeNode {
  int depth = 0;
  double count0 = 0.0;  // weighted class counts
  double count1 = 0.0;
  int sample_count = 0;  // unweighted bootstrap rows at this node

  // Split node fields (dc_index >= 0): rows with value <= threshold go left.
  int dc_index = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;

  // Leaf fields.
  int leaf_class = -1;
  double proba = 0.0;  // weighted positive fraction

  bool is_leaf() const { return dc_index < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<std::uint32_t> bootstrap;
};

struct Forest {
  ForestConfig config;
  std::vector<Tree> trees;
};

struct SplitChoice {
  int dc_index = 0;
  double threshold = 0.0;
  double gini_gain = 0.0;
};

// CART split search: candidate thresholds are midpoints between consecutive
// distinct values; picks the maximal weighted Gini gain, ties resolved by
// lower dc index then lower threshold. Empty when no candidate gains.
std::optional<SplitChoice> best_split(const DCMatrix& matrix,
                                      const std::vector<std::uint32_t>& samples,
                                      const std::vector<int>& candidate_dcs,
                                      const std::vector<std::uint8_t>& target,
                                      double weight0, double weight1);

// Trains the ensemble. Tree t draws its randomness from (config.seed, t)
// only, so training is reproducible at any thread count.
Forest plant_forest(const DCMatrix& matrix, const std::vector<std::uint8_t>& target,
                    const ForestConfig& config, int threads = 0);

struct ValidationReport {
  bool good_learned = false;
  double learning_score = 0.0;  // (tpr + tnr) / 2
  double tpr = 0.0;
  double tnr = 0.0;
  std::vector<std::string> error_features;
};

// Ensemble majority vote over the training set (ties go to class 1).
ValidationReport val_forest(const Forest& forest, const DCMatrix& matrix,
                            const std::vector<std::uint8_t>& target, int threads = 0);

struct ParsedNode {
  int tree_id = 0;
  int node_id = 0;
  int depth = 0;
  double count0 = 0.0;
  double count1 = 0.0;
  int sample_count = 0;
  int dc_index = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_class = -1;
  double proba = 0.0;

  bool is_leaf() const { return dc_index < 0; }
};

struct DecisionPath {
  int tree_id = 0;
  std::vector<int> node_ids;  // root .. leaf
};

struct RouteCondition {
  std::string dc_name;
  bool greater = false;  // false: value <= threshold, true: value > threshold
  double threshold = 0.0;
};

struct Route {
  int tree_id = 0;
  int leaf_node_id = 0;
  std::vector<RouteCondition> conditions;
  int leaf_class = 0;
  double support = 0.0;  // training rows reaching the leaf
  double purity = 0.0;   // leaf probability of leaf_class
};

struct ClimbResult {
  std::vector<ParsedNode> nodes;
  std::vector<DecisionPath> paths;
  std::vector<Route> routes;
};

// Flattens every node, root-to-leaf path, and leaf route of the forest.
ClimbResult climb_forest(const Forest& forest, const std::vector<std::string>& feature_list);

int predict_row(const Tree& tree, const DCVector& row);

void write_forest_json(const std::filesystem::path& path, const Forest& forest,
                       const std::vector<std::string>& feature_list);

}  // namespace dscope
