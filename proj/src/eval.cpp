#include "humor/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "humor/features.hpp"
#include "humor/jobs.hpp"
#include "humor/rng.hpp"
#include "json.hpp"

namespace humor {

using nlohmann::json;

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Chance:
      return "Chance";
    case ModelKind::Base:
      return "Base";
    case ModelKind::Cnn:
      return "CNN";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "chance" || s == "Chance") return ModelKind::Chance;
  if (s == "base" || s == "Base" || s == "rf") return ModelKind::Base;
  if (s == "cnn" || s == "CNN") return ModelKind::Cnn;
  throw DataError("unknown model kind: " + s);
}

namespace {

struct Confusion {
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  void add(Label pred, Label gold) {
    if (pred == Label::Laughter)
      gold == Label::Laughter ? tp++ : fp++;
    else
      gold == Label::Laughter ? fn++ : tn++;
  }

  Metrics metrics() const {
    Metrics m;
    uint64_t n = tp + fp + fn + tn;
    m.accuracy = n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(n);
    m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
  }
};

}  // namespace

Metrics compute_metrics(const std::vector<Label>& predictions,
                        const std::vector<Label>& golds) {
  if (predictions.size() != golds.size())
    throw LengthMismatchError("predictions/golds length mismatch: " +
                              std::to_string(predictions.size()) + " vs " +
                              std::to_string(golds.size()));
  if (predictions.empty()) throw EmptyInputError("no predictions to score");
  Confusion c;
  for (size_t i = 0; i < predictions.size(); ++i) c.add(predictions[i], golds[i]);
  return c.metrics();
}

std::vector<Label> chance_baseline(size_t n_instances, uint64_t seed) {
  Rng rng(seed);
  std::vector<Label> out(n_instances);
  for (auto& l : out) l = rng.next_bool() ? Label::Laughter : Label::NoLaughter;
  return out;
}

namespace {

void validate_plan(const Corpus& corpus, const FoldPlan& plan) {
  if (plan.folds.size() != plan.k)
    throw FoldMismatchError("fold plan holds " + std::to_string(plan.folds.size()) +
                            " folds, k is " + std::to_string(plan.k));
  std::vector<bool> seen(corpus.instances.size(), false);
  for (const auto& fold : plan.folds) {
    for (size_t ordinal : fold) {
      if (ordinal >= seen.size())
        throw FoldMismatchError("fold ordinal " + std::to_string(ordinal) +
                                " out of range");
      if (seen[ordinal])
        throw FoldMismatchError("fold ordinal " + std::to_string(ordinal) + " repeated");
      seen[ordinal] = true;
    }
  }
  for (size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i])
      throw FoldMismatchError("instance " + std::to_string(i) + " missing from the plan");
  }
}

std::vector<LabeledInstance> gather(const Corpus& corpus, const std::vector<size_t>& which) {
  std::vector<LabeledInstance> out;
  out.reserve(which.size());
  for (size_t i : which) out.push_back(corpus.instances[i]);
  return out;
}

}  // namespace

CvResult run_cv(const Corpus& corpus, const FoldPlan& plan, ModelKind kind,
                const CvConfig& config, const Resources& res, uint64_t master_seed,
                unsigned jobs) {
  validate_plan(corpus, plan);
  if (kind == ModelKind::Base &&
      (!res.embeddings || !res.phones || !res.senses || !res.subjectivity))
    throw DataError("Base model needs embeddings, phones, senses and subjectivity resources");
  if (kind == ModelKind::Cnn && !res.embeddings)
    throw DataError("CNN needs an embedding table");

  CvResult result;
  result.model_kind = kind;
  result.predictions.assign(corpus.instances.size(), Label::NoLaughter);

  Confusion pooled;
  for (size_t fold = 0; fold < plan.k; ++fold) {
    const auto& test_ordinals = plan.folds[fold];
    std::vector<size_t> train_ordinals;
    for (size_t f = 0; f < plan.k; ++f) {
      if (f == fold) continue;
      train_ordinals.insert(train_ordinals.end(), plan.folds[f].begin(),
                            plan.folds[f].end());
    }
    std::sort(train_ordinals.begin(), train_ordinals.end());
    const uint64_t fold_seed = mix_seed(master_seed, fold);

    std::vector<Label> fold_preds(test_ordinals.size());
    if (kind == ModelKind::Chance) {
      fold_preds = chance_baseline(test_ordinals.size(), fold_seed);
    } else if (kind == ModelKind::Base) {
      auto train_insts = gather(corpus, train_ordinals);
      auto ref = build_train_reference(train_insts, *res.embeddings);
      auto train_matrix = extract_matrix(train_insts, res, ref, config.knn_k, jobs);
      ForestConfig fc = config.forest;
      fc.seed = fold_seed;
      ForestModel forest = train_forest(train_matrix, fc, jobs);
      std::vector<std::vector<double>> rows(test_ordinals.size());
      parallel_for(test_ordinals.size(), jobs, [&](size_t i) {
        rows[i] = extract_features(corpus.instances[test_ordinals[i]], res, ref,
                                   config.knn_k);
      });
      for (size_t i = 0; i < rows.size(); ++i)
        fold_preds[i] = predict_forest(forest, rows[i]);
    } else {
      auto train_insts = gather(corpus, train_ordinals);
      CnnConfig cc = config.cnn;
      cc.seed = fold_seed;
      CnnModel model = train_cnn_on_corpus(train_insts, *res.embeddings, cc);
      for (size_t i = 0; i < test_ordinals.size(); ++i) {
        const auto& inst = corpus.instances[test_ordinals[i]];
        auto matrix = embed_sentence(inst.tokens, *res.embeddings,
                                     model.config.max_length);
        fold_preds[i] = predict_cnn(model, matrix).first;
      }
    }

    Confusion fold_conf;
    for (size_t i = 0; i < test_ordinals.size(); ++i) {
      Label gold = corpus.instances[test_ordinals[i]].label;
      fold_conf.add(fold_preds[i], gold);
      pooled.add(fold_preds[i], gold);
      result.predictions[test_ordinals[i]] = fold_preds[i];
    }
    result.per_fold.push_back(fold_conf.metrics());
  }
  result.aggregate = pooled.metrics();
  return result;
}

namespace {

json metrics_to_json(const Metrics& m) {
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1}};
}

}  // namespace

void save_cv_result(const CvResult& result, const std::string& path) {
  json j;
  j["model_kind"] = model_kind_name(result.model_kind);
  j["aggregate"] = metrics_to_json(result.aggregate);
  json folds = json::array();
  for (const auto& m : result.per_fold) folds.push_back(metrics_to_json(m));
  j["per_fold"] = std::move(folds);
  std::vector<std::string> preds;
  preds.reserve(result.predictions.size());
  for (Label l : result.predictions) preds.push_back(label_to_string(l));
  j["predictions"] = std::move(preds);
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

std::string format_metrics_table(
    const std::vector<std::pair<std::string, Metrics>>& rows) {
  std::ostringstream out;
  char buf[64];
  out << "Model     Acc. (%)     F1  Precision  Recall\n";
  for (const auto& [name, m] : rows) {
    std::snprintf(buf, sizeof(buf), "%-8s  %8.1f  %5.3f  %9.3f  %6.3f\n", name.c_str(),
                  m.accuracy * 100.0, m.f1, m.precision, m.recall);
    out << buf;
  }
  return out.str();
}

SearchResult search_hyperparams(const HyperSpace& space, const Corpus& dev,
                                ModelKind kind, const Resources& res,
                                const CnnConfig& base_config) {
  if (kind != ModelKind::Cnn)
    throw std::invalid_argument("hyperparameter search covers the CNN only");
  if (dev.instances.empty()) throw EmptyInputError("empty dev corpus");
  if (space.budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (!res.embeddings) throw DataError("search needs an embedding table");
  if (space.filter_width.lo > space.filter_width.hi || space.filter_width.lo < 2 ||
      space.n_filters.lo > space.n_filters.hi || space.n_filters.lo < 1 ||
      space.dropout1.lo > space.dropout1.hi || space.dropout2.lo > space.dropout2.hi ||
      space.learning_rate.lo > space.learning_rate.hi)
    throw std::invalid_argument("empty or inverted hyperparameter range");

  // one stratified 80/20 split, shared by every trial
  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < dev.instances.size(); ++i)
    by_class[static_cast<size_t>(label_index(dev.instances[i].label))].push_back(i);
  Rng r_split(mix_seed(space.seed, 0xA11));
  std::vector<size_t> train_idx, val_idx;
  for (auto& cls : by_class) {
    r_split.shuffle(cls);
    size_t n_val = cls.size() / 5;
    if (n_val == 0 && cls.size() >= 2) n_val = 1;
    for (size_t i = 0; i < cls.size(); ++i)
      (i < n_val ? val_idx : train_idx).push_back(cls[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  if (train_idx.empty() || val_idx.empty())
    throw DegenerateSplitError("dev corpus too small for an 80/20 split");

  std::vector<LabeledInstance> train_insts, val_insts;
  for (size_t i : train_idx) train_insts.push_back(dev.instances[i]);
  for (size_t i : val_idx) val_insts.push_back(dev.instances[i]);

  SearchResult result;
  bool have_best = false;
  for (size_t t = 0; t < space.budget; ++t) {
    Rng r(mix_seed(space.seed, t));
    Trial trial;
    trial.index = t;
    CnnConfig cfg = base_config;
    cfg.filter_width = static_cast<size_t>(
        r.next_int(static_cast<int64_t>(space.filter_width.lo),
                   static_cast<int64_t>(space.filter_width.hi)));
    cfg.n_filters = static_cast<size_t>(
        r.next_int(static_cast<int64_t>(space.n_filters.lo),
                   static_cast<int64_t>(space.n_filters.hi)));
    cfg.dropout1 = r.next_uniform(space.dropout1.lo, space.dropout1.hi);
    cfg.dropout2 = r.next_uniform(space.dropout2.lo, space.dropout2.hi);
    cfg.learning_rate = r.next_uniform(space.learning_rate.lo, space.learning_rate.hi);
    cfg.max_length = 0;  // re-derived per trial: filter_width changes the floor
    cfg.seed = mix_seed(space.seed, 0xBEEF00 + t);
    trial.config = cfg;

    try {
      CnnModel model = train_cnn_on_corpus(train_insts, *res.embeddings, cfg);
      size_t correct = 0;
      for (const auto& inst : val_insts) {
        auto matrix =
            embed_sentence(inst.tokens, *res.embeddings, model.config.max_length);
        if (predict_cnn(model, matrix).first == inst.label) correct++;
      }
      trial.val_accuracy =
          static_cast<double>(correct) / static_cast<double>(val_insts.size());
      trial.config = model.config;  // records the resolved max_length
    } catch (const std::exception& e) {
      trial.failed = true;
      trial.error = e.what();
    }
    if (!trial.failed && (!have_best || trial.val_accuracy > result.best_accuracy)) {
      have_best = true;
      result.best_config = trial.config;
      result.best_trial = t;
      result.best_accuracy = trial.val_accuracy;
    }
    result.trials.push_back(std::move(trial));
  }
  if (!have_best) throw DataError("every search trial failed");
  return result;
}

namespace {

json cnn_config_to_json(const CnnConfig& c) {
  return json{{"filter_width", c.filter_width},
              {"n_filters", c.n_filters},
              {"dropout1", c.dropout1},
              {"dropout2", c.dropout2},
              {"max_length", c.max_length},
              {"embedding_dim", c.embedding_dim},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"seed", c.seed}};
}

}  // namespace

void save_search_result(const SearchResult& result, const std::string& best_path,
                        const std::string& log_path) {
  {
    json j;
    j["best_trial"] = result.best_trial;
    j["best_accuracy"] = result.best_accuracy;
    j["config"] = cnn_config_to_json(result.best_config);
    std::ofstream out(best_path);
    if (!out) throw DataError("cannot open for writing: " + best_path);
    out << j.dump(2) << "\n";
  }
  {
    std::ofstream out(log_path);
    if (!out) throw DataError("cannot open for writing: " + log_path);
    for (const auto& t : result.trials) {
      json j;
      j["trial"] = t.index;
      j["config"] = cnn_config_to_json(t.config);
      if (t.failed) {
        j["status"] = "failed";
        j["error"] = t.error;
      } else {
        j["status"] = "ok";
        j["val_accuracy"] = t.val_accuracy;
      }
      out << j.dump() << "\n";
    }
  }
}

}  // namespace humor
