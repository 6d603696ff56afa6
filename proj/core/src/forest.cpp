#include "defectscope/forest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>

#include <nlohmann/json.hpp>

#include "defectscope/errors.hpp"
#include "defectscope/parallel.hpp"
#include "defectscope/rng.hpp"

namespace dscope {

void ForestConfig::validate() const {
  if (n_tree < 1) raise(Errc::invalid_config, "n_tree must be >= 1");
  if (max_depth < 1) raise(Errc::invalid_config, "max_depth must be >= 1");
  if (min_samples_leaf < 1) raise(Errc::invalid_config, "min_samples_leaf must be >= 1");
  if (features_per_split < 1 || features_per_split > static_cast<int>(kFeatureCount)) {
    raise(Errc::invalid_config, "features_per_split must be in [1, 18]");
  }
  if (!(good_learned_threshold >= 0.0 && good_learned_threshold <= 1.0)) {
    raise(Errc::invalid_config, "good_learned_threshold must be in [0, 1]");
  }
}

namespace {

double gini(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  const double p0 = w0 / w;
  const double p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

}  // namespace

std::optional<SplitChoice> best_split(const DCMatrix& matrix,
                                      const std::vector<std::uint32_t>& samples,
                                      const std::vector<int>& candidate_dcs,
                                      const std::vector<std::uint8_t>& target,
                                      double weight0, double weight1) {
  const std::size_t m = samples.size();
  if (m < 2) return std::nullopt;

  double parent_w0 = 0.0;
  double parent_w1 = 0.0;
  for (const std::uint32_t s : samples) {
    (target[s] ? parent_w1 : parent_w0) += target[s] ? weight1 : weight0;
  }
  const double parent_w = parent_w0 + parent_w1;
  const double parent_impurity = gini(parent_w0, parent_w1);

  std::optional<SplitChoice> best;
  std::vector<std::pair<double, std::uint8_t>> column(m);

  for (const int dc : candidate_dcs) {
    for (std::size_t i = 0; i < m; ++i) {
      column[i] = {matrix.rows[samples[i]][dc], target[samples[i]]};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double left_w0 = 0.0;
    double left_w1 = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      (column[i].second ? left_w1 : left_w0) += column[i].second ? weight1 : weight0;
      if (column[i].first == column[i + 1].first) continue;

      const double threshold = (column[i].first + column[i + 1].first) / 2.0;
      const double right_w0 = parent_w0 - left_w0;
      const double right_w1 = parent_w1 - left_w1;
      const double lw = left_w0 + left_w1;
      const double rw = right_w0 + right_w1;
      const double gain = parent_impurity -
                          (lw * gini(left_w0, left_w1) + rw * gini(right_w0, right_w1)) / parent_w;
      if (!best || gain > best->gini_gain ||
          (gain == best->gini_gain &&
           (dc < best->dc_index || (dc == best->dc_index && threshold < best->threshold)))) {
        best = SplitChoice{dc, threshold, gain};
      }
    }
  }

  if (best && best->gini_gain <= 0.0) return std::nullopt;
  return best;
}

namespace {

struct TreeBuilder {
  const DCMatrix& matrix;
  const std::vector<std::uint8_t>& target;
  const ForestConfig& config;
  double weight0;
  double weight1;
  Rng rng;
  Tree tree;

  int build(std::vector<std::uint32_t>& samples, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    {
      TreeNode& node = tree.nodes[id];
      node.depth = depth;
      node.sample_count = static_cast<int>(samples.size());
      for (const std::uint32_t s : samples) {
        if (target[s]) {
          node.count1 += weight1;
        } else {
          node.count0 += weight0;
        }
      }
    }

    const double w0 = tree.nodes[id].count0;
    const double w1 = tree.nodes[id].count1;
    const bool pure = w0 == 0.0 || w1 == 0.0;
    const bool can_split = depth < config.max_depth &&
                           samples.size() >= 2 * static_cast<std::size_t>(config.min_samples_leaf) &&
                           !pure;

    std::optional<SplitChoice> choice;
    if (can_split) {
      // Sample features_per_split characteristics without replacement.
      std::array<int, kFeatureCount> pool;
      for (std::size_t i = 0; i < kFeatureCount; ++i) pool[i] = static_cast<int>(i);
      const int k = config.features_per_split;
      std::vector<int> candidates(k);
      for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.below(kFeatureCount - i));
        std::swap(pool[i], pool[j]);
        candidates[i] = pool[i];
      }
      choice = best_split(matrix, samples, candidates, target, weight0, weight1);
    }

    if (choice) {
      std::vector<std::uint32_t> left_samples;
      std::vector<std::uint32_t> right_samples;
      left_samples.reserve(samples.size());
      right_samples.reserve(samples.size());
      for (const std::uint32_t s : samples) {
        if (matrix.rows[s][choice->dc_index] <= choice->threshold) {
          left_samples.push_back(s);
        } else {
          right_samples.push_back(s);
        }
      }
      if (left_samples.size() >= static_cast<std::size_t>(config.min_samples_leaf) &&
          right_samples.size() >= static_cast<std::size_t>(config.min_samples_leaf)) {
        samples.clear();
        samples.shrink_to_fit();
        tree.nodes[id].dc_index = choice->dc_index;
        tree.nodes[id].threshold = choice->threshold;
        const int left = build(left_samples, depth + 1);
        tree.nodes[id].left = left;
        const int right = build(right_samples, depth + 1);
        tree.nodes[id].right = right;
        return id;
      }
    }

    TreeNode& node = tree.nodes[id];
    node.leaf_class = node.count1 >= node.count0 ? 1 : 0;
    node.proba = (w0 + w1) > 0.0 ? w1 / (w0 + w1) : 0.0;
    return id;
  }
};

}  // namespace

Forest plant_forest(const DCMatrix& matrix, const std::vector<std::uint8_t>& target,
                    const ForestConfig& config, int threads) {
  config.validate();
  if (matrix.rows.size() != target.size()) {
    raise(Errc::length_mismatch, "matrix and target differ in length");
  }
  const std::size_t n = target.size();
  std::size_t positives = 0;
  for (const std::uint8_t t : target) positives += t ? 1 : 0;
  const std::size_t negatives = n - positives;
  if (positives < 2 || negatives < 2) {
    raise(Errc::degenerate_target,
          "target needs at least 2 samples of each class (got " + std::to_string(positives) +
              " positive, " + std::to_string(negatives) + " negative)");
  }

  // Balanced class weights computed on the full training set.
  const double weight0 =
      config.balance_classes ? static_cast<double>(n) / (2.0 * static_cast<double>(negatives)) : 1.0;
  const double weight1 =
      config.balance_classes ? static_cast<double>(n) / (2.0 * static_cast<double>(positives)) : 1.0;

  Forest forest;
  forest.config = config;
  forest.trees.resize(config.n_tree);

  parallel_for(static_cast<std::size_t>(config.n_tree), threads, [&](std::size_t t) {
    TreeBuilder builder{matrix, target, config, weight0, weight1,
                        Rng(config.seed, static_cast<std::uint64_t>(t)), Tree{}};
    builder.tree.bootstrap.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      builder.tree.bootstrap[i] = static_cast<std::uint32_t>(builder.rng.below(n));
    }
    std::vector<std::uint32_t> samples = builder.tree.bootstrap;
    builder.build(samples, 0);
    forest.trees[t] = std::move(builder.tree);
  });
  return forest;
}

int predict_row(const Tree& tree, const DCVector& row) {
  int id = 0;
  while (!tree.nodes[id].is_leaf()) {
    const TreeNode& node = tree.nodes[id];
    id = row[node.dc_index] <= node.threshold ? node.left : node.right;
  }
  return tree.nodes[id].leaf_class;
}

ValidationReport val_forest(const Forest& forest, const DCMatrix& matrix,
                            const std::vector<std::uint8_t>& target, int threads) {
  const std::size_t n = matrix.rows.size();
  if (n != target.size()) raise(Errc::length_mismatch, "matrix and target differ in length");
  const std::size_t n_trees = forest.trees.size();

  // votes[t * n + i] = tree t's class for row i.
  std::vector<std::uint8_t> votes(n_trees * n);
  parallel_for(n_trees, threads, [&](std::size_t t) {
    for (std::size_t i = 0; i < n; ++i) {
      votes[t * n + i] = static_cast<std::uint8_t>(predict_row(forest.trees[t], matrix.rows[i]));
    }
  });

  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::vector<std::uint8_t> ensemble(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ones = 0;
    for (std::size_t t = 0; t < n_trees; ++t) ones += votes[t * n + i];
    ensemble[i] = 2 * ones >= n_trees ? 1 : 0;  // tie goes to class 1
    if (target[i]) {
      ++pos;
      tp += ensemble[i] == 1 ? 1 : 0;
    } else {
      ++neg;
      tn += ensemble[i] == 0 ? 1 : 0;
    }
  }

  ValidationReport report;
  report.tpr = pos > 0 ? static_cast<double>(tp) / static_cast<double>(pos) : 0.0;
  report.tnr = neg > 0 ? static_cast<double>(tn) / static_cast<double>(neg) : 0.0;
  report.learning_score = (report.tpr + report.tnr) / 2.0;
  report.good_learned = report.learning_score >= forest.config.good_learned_threshold;

  // Count characteristics along the decision paths of wrongly-voting trees
  // for every misjudged sample.
  std::vector<std::size_t> counts(kFeatureCount, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (ensemble[i] == target[i]) continue;
    for (std::size_t t = 0; t < n_trees; ++t) {
      if (votes[t * n + i] == target[i]) continue;
      const Tree& tree = forest.trees[t];
      int id = 0;
      while (!tree.nodes[id].is_leaf()) {
        const TreeNode& node = tree.nodes[id];
        ++counts[node.dc_index];
        id = matrix.rows[i][node.dc_index] <= node.threshold ? node.left : node.right;
      }
    }
  }

  std::vector<std::size_t> hit;
  std::size_t total = 0;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (counts[f] > 0) {
      hit.push_back(f);
      total += counts[f];
    }
  }
  if (!hit.empty()) {
    const double mean = static_cast<double>(total) / static_cast<double>(hit.size());
    std::stable_sort(hit.begin(), hit.end(),
                     [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    for (const std::size_t f : hit) {
      if (static_cast<double>(counts[f]) >= mean) {
        report.error_features.push_back(feature_names()[f]);
      }
    }
  }
  return report;
}

ClimbResult climb_forest(const Forest& forest, const std::vector<std::string>& feature_list) {
  if (forest.trees.empty()) raise(Errc::invalid_config, "cannot climb an empty forest");

  ClimbResult out;
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const Tree& tree = forest.trees[t];
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      const TreeNode& node = tree.nodes[id];
      ParsedNode parsed;
      parsed.tree_id = static_cast<int>(t);
      parsed.node_id = static_cast<int>(id);
      parsed.depth = node.depth;
      parsed.count0 = node.count0;
      parsed.count1 = node.count1;
      parsed.sample_count = node.sample_count;
      parsed.dc_index = node.dc_index;
      parsed.threshold = node.threshold;
      parsed.left = node.left;
      parsed.right = node.right;
      parsed.leaf_class = node.leaf_class;
      parsed.proba = node.proba;
      out.nodes.push_back(parsed);
    }

    // Depth-first, left before right: one path and one route per leaf.
    struct Frame {
      int id;
      std::vector<int> trail;
      std::vector<RouteCondition> conditions;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{0, {}, {}});
    while (!stack.empty()) {
      Frame frame = std::move(stack.back());
      stack.pop_back();
      const TreeNode& node = tree.nodes[frame.id];
      frame.trail.push_back(frame.id);
      if (node.is_leaf()) {
        DecisionPath path;
        path.tree_id = static_cast<int>(t);
        path.node_ids = frame.trail;
        out.paths.push_back(std::move(path));

        Route route;
        route.tree_id = static_cast<int>(t);
        route.leaf_node_id = frame.id;
        route.conditions = frame.conditions;
        route.leaf_class = node.leaf_class;
        route.support = static_cast<double>(node.sample_count);
        route.purity = node.leaf_class == 1 ? node.proba : 1.0 - node.proba;
        out.routes.push_back(std::move(route));
        continue;
      }
      Frame right = frame;
      right.id = node.right;
      right.conditions.push_back(RouteCondition{feature_list[node.dc_index], true, node.threshold});
      Frame left = std::move(frame);
      left.id = node.left;
      left.conditions.push_back(RouteCondition{feature_list[node.dc_index], false, node.threshold});
      stack.push_back(std::move(right));  // popped after left
      stack.push_back(std::move(left));
    }
  }
  return out;
}

void write_forest_json(const std::filesystem::path& path, const Forest& forest,
                       const std::vector<std::string>& feature_list) {
  using json = nlohmann::ordered_json;

  std::function<json(const Tree&, int)> node_json = [&](const Tree& tree, int id) {
    const TreeNode& node = tree.nodes[id];
    json j;
    if (node.is_leaf()) {
      j["leaf"] = node.leaf_class;
      j["proba"] = node.proba;
      j["counts"] = {node.count0, node.count1};
    } else {
      j["dc"] = feature_list[node.dc_index];
      j["threshold"] = node.threshold;
      j["counts"] = {node.count0, node.count1};
      j["left"] = node_json(tree, node.left);
      j["right"] = node_json(tree, node.right);
    }
    return j;
  };

  json trees = json::array();
  for (const Tree& tree : forest.trees) trees.push_back(node_json(tree, 0));

  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::io_failure, "cannot create " + path.string());
  f << trees.dump(2) << '\n';
  if (!f.good()) raise(Errc::io_failure, "write failed: " + path.string());
}

}  // namespace dscope
