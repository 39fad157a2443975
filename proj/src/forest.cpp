#include "humor/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "humor/jobs.hpp"
#include "humor/rng.hpp"
#include "json.hpp"

namespace humor {

using nlohmann::json;

double gini_impurity(uint64_t a, uint64_t b) {
  uint64_t n = a + b;
  if (n == 0) return 0.0;
  double total = static_cast<double>(n);
  return 1.0 - (static_cast<double>(a) * static_cast<double>(a) +
                static_cast<double>(b) * static_cast<double>(b)) /
                   (total * total);
}

namespace {

struct SplitChoice {
  bool found = false;
  size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& data, const ForestConfig& cfg, size_t max_features,
              uint64_t seed)
      : data_(data), cfg_(cfg), max_features_(max_features), rng_(seed) {}

  std::unique_ptr<TreeNode> build() {
    std::vector<size_t> rows(data_.rows);
    for (size_t i = 0; i < data_.rows; ++i)
      rows[i] = static_cast<size_t>(rng_.next_below(data_.rows));
    std::sort(rows.begin(), rows.end());  // sample order must not affect splits
    return grow(rows, 0);
  }

 private:
  std::unique_ptr<TreeNode> grow(std::vector<size_t>& rows, size_t depth) {
    std::array<uint64_t, 2> counts{0, 0};
    for (size_t r : rows) counts[static_cast<size_t>(label_index(data_.labels[r]))]++;

    auto leaf = [&]() {
      auto node = std::make_unique<TreeNode>();
      node->is_leaf = true;
      node->class_counts = counts;
      return node;
    };

    if (counts[0] == 0 || counts[1] == 0) return leaf();
    if (rows.size() < 2 * cfg_.min_leaf) return leaf();
    if (cfg_.max_depth != 0 && depth >= cfg_.max_depth) return leaf();

    SplitChoice best = find_split(rows, counts);
    if (!best.found) return leaf();

    std::vector<size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (size_t r : rows) {
      if (data_.at(r, best.feature) < best.threshold)
        left_rows.push_back(r);
      else
        right_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    auto node = std::make_unique<TreeNode>();
    node->is_leaf = false;
    node->feature_index = best.feature;
    node->threshold = best.threshold;
    node->class_counts = counts;
    node->left = grow(left_rows, depth + 1);
    node->right = grow(right_rows, depth + 1);
    return node;
  }

  SplitChoice find_split(const std::vector<size_t>& rows, std::array<uint64_t, 2> counts) {
    // sample max_features distinct feature indices, then scan ascending so
    // equal gains resolve to the lowest feature / lowest threshold
    std::vector<size_t> pool(data_.cols);
    std::iota(pool.begin(), pool.end(), 0);
    size_t mf = std::min(max_features_, data_.cols);
    for (size_t i = 0; i < mf; ++i) {
      size_t j = i + static_cast<size_t>(rng_.next_below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::sort(pool.begin(), pool.begin() + static_cast<ptrdiff_t>(mf));

    const double n = static_cast<double>(rows.size());
    const double parent = gini_impurity(counts[0], counts[1]);

    SplitChoice best;
    std::vector<std::pair<double, int>> vals;  // (value, label index)
    vals.reserve(rows.size());
    for (size_t fi = 0; fi < mf; ++fi) {
      size_t f = pool[fi];
      vals.clear();
      for (size_t r : rows)
        vals.emplace_back(data_.at(r, f), label_index(data_.labels[r]));
      std::sort(vals.begin(), vals.end());
      std::array<uint64_t, 2> left{0, 0};
      for (size_t i = 0; i + 1 < vals.size(); ++i) {
        left[static_cast<size_t>(vals[i].second)]++;
        if (vals[i].first == vals[i + 1].first) continue;
        uint64_t nl = left[0] + left[1];
        uint64_t nr = rows.size() - nl;
        if (nl < cfg_.min_leaf || nr < cfg_.min_leaf) continue;
        std::array<uint64_t, 2> right{counts[0] - left[0], counts[1] - left[1]};
        double child =
            (static_cast<double>(nl) * gini_impurity(left[0], left[1]) +
             static_cast<double>(nr) * gini_impurity(right[0], right[1])) /
            n;
        double gain = parent - child;
        if (gain > 0.0 && (!best.found || gain > best.gain)) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const FeatureMatrix& data_;
  const ForestConfig& cfg_;
  size_t max_features_;
  Rng rng_;
};

}  // namespace

ForestModel train_forest(const FeatureMatrix& data, const ForestConfig& config,
                         unsigned jobs, bool* single_class_warning) {
  if (data.rows < 2) throw DataError("need at least 2 training rows");
  if (config.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");

  std::array<uint64_t, 2> counts{0, 0};
  for (Label l : data.labels) counts[static_cast<size_t>(label_index(l))]++;
  bool single_class = counts[0] == 0 || counts[1] == 0;
  if (single_class_warning) *single_class_warning = single_class;

  ForestModel model;
  model.config = config;
  model.feature_width = data.cols;
  if (model.config.max_features == 0)
    model.config.max_features =
        static_cast<size_t>(std::floor(std::sqrt(static_cast<double>(data.cols))));
  model.config.max_features = std::min(model.config.max_features, data.cols);

  model.trees.resize(model.config.n_trees);
  parallel_for(model.config.n_trees, jobs, [&](size_t t) {
    TreeBuilder builder(data, model.config, model.config.max_features,
                        mix_seed(model.config.seed, t));
    model.trees[t] = builder.build();
  });
  return model;
}

namespace {

const TreeNode* route(const TreeNode* node, const std::vector<double>& x) {
  while (!node->is_leaf)
    node = x[node->feature_index] < node->threshold ? node->left.get() : node->right.get();
  return node;
}

}  // namespace

std::array<double, 2> predict_proba(const ForestModel& model, const std::vector<double>& x) {
  if (x.size() != model.feature_width)
    throw WidthMismatchError("expected " + std::to_string(model.feature_width) +
                             " features, got " + std::to_string(x.size()));
  uint64_t laughter_votes = 0;
  for (const auto& tree : model.trees) {
    const TreeNode* leaf = route(tree.get(), x);
    // leaf majority; ties vote NoLaughter
    if (leaf->class_counts[0] > leaf->class_counts[1]) laughter_votes++;
  }
  double p_laughter =
      static_cast<double>(laughter_votes) / static_cast<double>(model.trees.size());
  return {p_laughter, 1.0 - p_laughter};
}

Label predict_forest(const ForestModel& model, const std::vector<double>& x) {
  auto proba = predict_proba(model, x);
  return proba[0] > proba[1] ? Label::Laughter : Label::NoLaughter;
}

namespace {

json node_to_json(const TreeNode& node) {
  json j;
  if (node.is_leaf) {
    j["counts"] = node.class_counts;
  } else {
    j["feature"] = node.feature_index;
    j["threshold"] = node.threshold;
    j["left"] = node_to_json(*node.left);
    j["right"] = node_to_json(*node.right);
  }
  return j;
}

std::unique_ptr<TreeNode> node_from_json(const json& j) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("counts")) {
    node->is_leaf = true;
    node->class_counts = j.at("counts").get<std::array<uint64_t, 2>>();
    if (node->class_counts[0] == 0 && node->class_counts[1] == 0)
      throw DataError("leaf with empty class counts");
  } else {
    node->is_leaf = false;
    node->feature_index = j.at("feature").get<size_t>();
    node->threshold = j.at("threshold").get<double>();
    node->left = node_from_json(j.at("left"));
    node->right = node_from_json(j.at("right"));
  }
  return node;
}

}  // namespace

void save_forest(const ForestModel& model, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "random_forest";
  j["config"] = {{"n_trees", model.config.n_trees},
                 {"max_features", model.config.max_features},
                 {"min_leaf", model.config.min_leaf},
                 {"max_depth", model.config.max_depth},
                 {"seed", model.config.seed}};
  j["feature_width"] = model.feature_width;
  json trees = json::array();
  for (const auto& tree : model.trees) trees.push_back(node_to_json(*tree));
  j["trees"] = std::move(trees);
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump() << "\n";
}

ForestModel load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw DataError(path + ": unsupported format_version");
    if (j.at("kind").get<std::string>() != "random_forest")
      throw DataError(path + ": not a random forest model");
    ForestModel model;
    const json& c = j.at("config");
    model.config.n_trees = c.at("n_trees").get<size_t>();
    model.config.max_features = c.at("max_features").get<size_t>();
    model.config.min_leaf = c.at("min_leaf").get<size_t>();
    model.config.max_depth = c.at("max_depth").get<size_t>();
    model.config.seed = c.at("seed").get<uint64_t>();
    model.feature_width = j.at("feature_width").get<size_t>();
    for (const auto& t : j.at("trees")) model.trees.push_back(node_from_json(t));
    if (model.trees.size() != model.config.n_trees)
      throw DataError(path + ": tree count does not match config");
    for (const auto& tree : model.trees) {
      // stored feature indices must fit the advertised width
      std::vector<const TreeNode*> stack{tree.get()};
      while (!stack.empty()) {
        const TreeNode* n = stack.back();
        stack.pop_back();
        if (n->is_leaf) continue;
        if (n->feature_index >= model.feature_width)
          throw DataError(path + ": feature index out of range");
        stack.push_back(n->left.get());
        stack.push_back(n->right.get());
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace humor
