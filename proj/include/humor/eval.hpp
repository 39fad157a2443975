#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "humor/cnn.hpp"
#include "humor/corpus.hpp"
#include "humor/forest.hpp"
#include "humor/resources.hpp"

namespace humor {

// Positive class is Laughter throughout.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class ModelKind { Chance, Base, Cnn };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

Metrics compute_metrics(const std::vector<Label>& predictions,
                        const std::vector<Label>& golds);

// seeded uniform coin per instance
std::vector<Label> chance_baseline(size_t n_instances, uint64_t seed);

struct CvResult {
  ModelKind model_kind = ModelKind::Chance;
  std::vector<Metrics> per_fold;
  Metrics aggregate;  // from pooled confusion counts, not the fold mean
  std::vector<Label> predictions;  // by corpus ordinal
};

struct CvConfig {
  ForestConfig forest;
  CnnConfig cnn;
  size_t knn_k = 5;
};

// For each fold: train on the remaining folds (the kNN reference and the
// CNN's early-stopping split are drawn from training folds only), predict the
// held-out fold. Per-fold seeds come from mix_seed(master_seed, fold).
CvResult run_cv(const Corpus& corpus, const FoldPlan& plan, ModelKind kind,
                const CvConfig& config, const Resources& res, uint64_t master_seed,
                unsigned jobs = 1);

void save_cv_result(const CvResult& result, const std::string& path);

// Text table shaped like the reported results: accuracy in percent with one
// decimal, the other columns with three.
std::string format_metrics_table(
    const std::vector<std::pair<std::string, Metrics>>& rows);

struct IntRange {
  size_t lo = 0;
  size_t hi = 0;
};
struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct HyperSpace {
  IntRange filter_width{6, 6};
  IntRange n_filters{100, 100};
  RealRange dropout1{0.7, 0.7};
  RealRange dropout2{0.35, 0.35};
  RealRange learning_rate{0.001, 0.001};
  size_t budget = 200;
  uint64_t seed = 0;
};

struct Trial {
  size_t index = 0;
  CnnConfig config;
  double val_accuracy = 0.0;
  bool failed = false;
  std::string error;
};

struct SearchResult {
  CnnConfig best_config;
  size_t best_trial = 0;
  double best_accuracy = 0.0;
  std::vector<Trial> trials;
};

// Seeded random search: budget configurations sampled uniformly from the
// ranges, each scored by one stratified 80/20 train/validate split of dev
// (the split is fixed across trials); ties keep the earlier trial. Failed
// trials are logged and skipped. Only the CNN is searchable.
SearchResult search_hyperparams(const HyperSpace& space, const Corpus& dev,
                                ModelKind kind, const Resources& res,
                                const CnnConfig& base_config);

void save_search_result(const SearchResult& result, const std::string& best_path,
                        const std::string& log_path);

}  // namespace humor
