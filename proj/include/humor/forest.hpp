#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "humor/corpus.hpp"
#include "humor/features.hpp"

namespace humor {

// Binary decision tree node. Internal nodes route feature < threshold to the
// left child; leaves hold the training class counts (Laughter, NoLaughter).
struct TreeNode {
  bool is_leaf = true;
  size_t feature_index = 0;
  double threshold = 0.0;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;
  std::array<uint64_t, 2> class_counts{0, 0};
};

struct ForestConfig {
  size_t n_trees = 500;
  size_t max_features = 0;  // 0: floor(sqrt(feature width))
  size_t min_leaf = 1;
  size_t max_depth = 0;  // 0: unlimited
  uint64_t seed = 0;
};

struct ForestModel {
  std::vector<std::unique_ptr<TreeNode>> trees;
  ForestConfig config;
  size_t feature_width = 0;
};

// Gini impurity of a two-class count pair: 1 - (a^2 + b^2) / (a+b)^2.
double gini_impurity(uint64_t a, uint64_t b);

// Bagged trees: each tree gets a bootstrap sample drawn from
// mix_seed(config.seed, tree_index), splits maximize Gini decrease over
// max_features sampled feature indices with midpoint thresholds, ties going
// to the lowest feature index then lowest threshold. Training is
// deterministic and may run across jobs threads. A single-class y is allowed
// (every leaf predicts that class); *single_class_warning is set when given.
ForestModel train_forest(const FeatureMatrix& data, const ForestConfig& config,
                         unsigned jobs = 1, bool* single_class_warning = nullptr);

// per-class fraction of tree votes (index 0 = Laughter); leaf ties vote
// NoLaughter
std::array<double, 2> predict_proba(const ForestModel& model, const std::vector<double>& x);
// argmax of the vote fractions, tie resolved to NoLaughter
Label predict_forest(const ForestModel& model, const std::vector<double>& x);

void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

}  // namespace humor
