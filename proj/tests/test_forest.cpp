#include "doctest.h"
#include "humor/forest.hpp"

#include <cmath>

#include "helpers.hpp"
#include "humor/rng.hpp"
#include "json.hpp"

using namespace humor;

namespace {

// 20 points, margin 1 on feature 0, feature 1 pure noise
FeatureMatrix separable_toy() {
  FeatureMatrix m;
  m.cols = 2;
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    m.values.push_back(0.1 * i);
    m.values.push_back(rng.next_uniform(-1.0, 1.0));
    m.labels.push_back(Label::Laughter);
  }
  for (int i = 0; i < 10; ++i) {
    m.values.push_back(2.0 + 0.1 * i);
    m.values.push_back(rng.next_uniform(-1.0, 1.0));
    m.labels.push_back(Label::NoLaughter);
  }
  m.rows = 20;
  return m;
}

// Independent oracle: exhaustive single-feature threshold stumps.
double best_stump_accuracy(const FeatureMatrix& data) {
  double best = 0.0;
  for (size_t f = 0; f < data.cols; ++f) {
    std::vector<double> vals;
    for (size_t r = 0; r < data.rows; ++r) vals.push_back(data.at(r, f));
    std::sort(vals.begin(), vals.end());
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
      if (vals[i] == vals[i + 1]) continue;
      double thr = 0.5 * (vals[i] + vals[i + 1]);
      size_t correct_lo_laugh = 0, correct_lo_no = 0;
      for (size_t r = 0; r < data.rows; ++r) {
        bool lo = data.at(r, f) < thr;
        bool laugh = data.labels[r] == Label::Laughter;
        if (lo == laugh) correct_lo_laugh++;
        if (lo != laugh) correct_lo_no++;
      }
      best = std::max({best,
                       static_cast<double>(correct_lo_laugh) / data.rows,
                       static_cast<double>(correct_lo_no) / data.rows});
    }
  }
  return best;
}

double training_accuracy(const ForestModel& model, const FeatureMatrix& data) {
  size_t correct = 0;
  for (size_t r = 0; r < data.rows; ++r) {
    std::vector<double> x(data.cols);
    for (size_t c = 0; c < data.cols; ++c) x[c] = data.at(r, c);
    if (predict_forest(model, x) == data.labels[r]) correct++;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows);
}

std::unique_ptr<TreeNode> leaf(uint64_t laugh, uint64_t no) {
  auto n = std::make_unique<TreeNode>();
  n->is_leaf = true;
  n->class_counts = {laugh, no};
  return n;
}

ForestModel hand_forest(std::vector<std::unique_ptr<TreeNode>> trees) {
  ForestModel m;
  m.feature_width = 1;
  m.config.n_trees = trees.size();
  m.trees = std::move(trees);
  return m;
}

}  // namespace

TEST_CASE("gini impurity hand values") {
  CHECK(gini_impurity(2, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gini_impurity(4, 0) == 0.0);
  CHECK(gini_impurity(0, 4) == 0.0);
  CHECK(gini_impurity(1, 3) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("constant labels are allowed and always predicted") {
  FeatureMatrix m;
  m.rows = 4;
  m.cols = 1;
  m.values = {0.0, 1.0, 2.0, 3.0};
  m.labels = std::vector<Label>(4, Label::Laughter);
  bool warned = false;
  ForestConfig cfg;
  cfg.n_trees = 5;
  auto model = train_forest(m, cfg, 1, &warned);
  CHECK(warned);
  CHECK(predict_forest(model, {9.0}) == Label::Laughter);
  CHECK(predict_proba(model, {9.0})[0] == 1.0);
}

TEST_CASE("separable toy set trains to accuracy 1.0, matching the stump oracle") {
  auto data = separable_toy();
  CHECK(best_stump_accuracy(data) == 1.0);  // the oracle says the set is separable
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.seed = 4;
  auto model = train_forest(data, cfg);
  CHECK(training_accuracy(model, data) == 1.0);
}

TEST_CASE("vote fractions from hand-built stumps") {
  std::vector<std::unique_ptr<TreeNode>> trees;
  trees.push_back(leaf(1, 0));  // votes Laughter
  trees.push_back(leaf(1, 0));
  trees.push_back(leaf(0, 1));  // votes NoLaughter
  auto model = hand_forest(std::move(trees));
  auto proba = predict_proba(model, {0.0});
  CHECK(proba[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(proba[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(proba[0] + proba[1] == 1.0);  // one division then the complement
  CHECK(predict_forest(model, {0.0}) == Label::Laughter);
}

TEST_CASE("single pure-leaf tree gives an exact one-hot proba") {
  std::vector<std::unique_ptr<TreeNode>> trees;
  trees.push_back(leaf(3, 0));
  auto model = hand_forest(std::move(trees));
  CHECK(predict_proba(model, {0.0}) == std::array<double, 2>{1.0, 0.0});
}

TEST_CASE("even vote splits and leaf ties resolve to NoLaughter") {
  std::vector<std::unique_ptr<TreeNode>> trees;
  trees.push_back(leaf(1, 0));
  trees.push_back(leaf(0, 1));
  auto even = hand_forest(std::move(trees));
  CHECK(predict_forest(even, {0.0}) == Label::NoLaughter);

  std::vector<std::unique_ptr<TreeNode>> tied;
  tied.push_back(leaf(2, 2));  // leaf tie votes NoLaughter
  auto tied_model = hand_forest(std::move(tied));
  CHECK(predict_forest(tied_model, {0.0}) == Label::NoLaughter);
}

TEST_CASE("width mismatch is rejected") {
  auto data = separable_toy();
  ForestConfig cfg;
  cfg.n_trees = 2;
  auto model = train_forest(data, cfg);
  CHECK_THROWS_AS(predict_forest(model, {1.0, 2.0, 3.0}), WidthMismatchError);
}

TEST_CASE("training twice with one seed serializes byte-identically") {
  auto data = separable_toy();
  ForestConfig cfg;
  cfg.n_trees = 12;
  cfg.seed = 99;
  auto dir = fixtures::temp_dir("forest_det");
  save_forest(train_forest(data, cfg), dir + "/a.json");
  save_forest(train_forest(data, cfg), dir + "/b.json");
  CHECK(fixtures::read_file(dir + "/a.json") == fixtures::read_file(dir + "/b.json"));
  // thread count must not change the result
  save_forest(train_forest(data, cfg, 4), dir + "/c.json");
  CHECK(fixtures::read_file(dir + "/a.json") == fixtures::read_file(dir + "/c.json"));
}

TEST_CASE("per-tree samples depend on (seed, index) only") {
  auto data = separable_toy();
  ForestConfig small;
  small.n_trees = 3;
  small.seed = 5;
  ForestConfig big = small;
  big.n_trees = 6;
  auto dir = fixtures::temp_dir("forest_prefix");
  save_forest(train_forest(data, small), dir + "/small.json");
  save_forest(train_forest(data, big), dir + "/big.json");
  auto js = nlohmann::json::parse(fixtures::read_file(dir + "/small.json"));
  auto jb = nlohmann::json::parse(fixtures::read_file(dir + "/big.json"));
  for (size_t t = 0; t < 3; ++t) CHECK(js["trees"][t] == jb["trees"][t]);
}

TEST_CASE("model files round-trip exactly") {
  auto data = separable_toy();
  ForestConfig cfg;
  cfg.n_trees = 7;
  cfg.seed = 13;
  auto dir = fixtures::temp_dir("forest_rt");
  auto model = train_forest(data, cfg);
  save_forest(model, dir + "/m.json");
  auto loaded = load_forest(dir + "/m.json");
  save_forest(loaded, dir + "/m2.json");
  CHECK(fixtures::read_file(dir + "/m.json") == fixtures::read_file(dir + "/m2.json"));
  CHECK(predict_proba(loaded, {0.5, 0.0}) == predict_proba(model, {0.5, 0.0}));
}

TEST_CASE("unknown format versions are rejected") {
  auto dir = fixtures::temp_dir("forest_ver");
  fixtures::write_file(dir + "/bad.json",
                       "{\"format_version\": 9, \"kind\": \"random_forest\", "
                       "\"config\": {}, \"feature_width\": 1, \"trees\": []}\n");
  CHECK_THROWS_AS(load_forest(dir + "/bad.json"), DataError);
}
