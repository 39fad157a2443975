#include "humor/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace humor {

using nlohmann::json;

size_t CnnModel::parameter_count() const {
  size_t n = 0;
  for (const auto& bank : banks) n += bank.kernels.size() + bank.biases.size();
  return n + fc_weights.size() + fc_bias.size();
}

void CnnGradients::accumulate(const CnnGradients& other) {
  for (size_t b = 0; b < kernels.size(); ++b) {
    for (size_t i = 0; i < kernels[b].size(); ++i) kernels[b][i] += other.kernels[b][i];
    for (size_t i = 0; i < biases[b].size(); ++i) biases[b][i] += other.biases[b][i];
  }
  for (size_t i = 0; i < fc_weights.size(); ++i) fc_weights[i] += other.fc_weights[i];
  fc_bias[0] += other.fc_bias[0];
  fc_bias[1] += other.fc_bias[1];
}

void CnnGradients::scale(double factor) {
  for (auto& k : kernels)
    for (double& x : k) x *= factor;
  for (auto& b : biases)
    for (double& x : b) x *= factor;
  for (double& x : fc_weights) x *= factor;
  fc_bias[0] *= factor;
  fc_bias[1] *= factor;
}

CnnGradients zero_gradients(const CnnModel& model) {
  CnnGradients g;
  for (const auto& bank : model.banks) {
    g.kernels.emplace_back(bank.kernels.size(), 0.0);
    g.biases.emplace_back(bank.biases.size(), 0.0);
  }
  g.fc_weights.assign(model.fc_weights.size(), 0.0);
  return g;
}

SentenceMatrix embed_sentence(const std::vector<std::string>& tokens,
                              const EmbeddingTable& embeddings, size_t max_length) {
  if (max_length == 0) throw std::invalid_argument("max_length must be >= 1");
  SentenceMatrix m;
  m.rows = max_length;
  m.cols = embeddings.dim();
  m.values.assign(m.rows * m.cols, 0.0);
  m.true_length = std::min(tokens.size(), max_length);
  for (size_t r = 0; r < m.true_length; ++r) {
    const auto& v = embeddings.lookup(tokens[r]);
    std::copy(v.begin(), v.end(), m.values.begin() + static_cast<ptrdiff_t>(r * m.cols));
  }
  return m;
}

std::vector<std::vector<double>> conv_forward(const SentenceMatrix& input,
                                              const FilterBank& bank) {
  if (bank.size > input.rows)
    throw FilterTooWideError("filter size " + std::to_string(bank.size) +
                             " exceeds sentence length " + std::to_string(input.rows));
  if (bank.dim != input.cols)
    throw DataError("filter dim " + std::to_string(bank.dim) + " != input dim " +
                    std::to_string(input.cols));
  const size_t out_len = input.rows - bank.size + 1;
  std::vector<std::vector<double>> maps(bank.n_filters);
  for (size_t k = 0; k < bank.n_filters; ++k) {
    auto& map = maps[k];
    map.resize(out_len);
    const double* kernel = bank.kernels.data() + k * bank.size * bank.dim;
    for (size_t i = 0; i < out_len; ++i) {
      double sum = bank.biases[k];
      const double* window = input.values.data() + i * input.cols;
      for (size_t j = 0; j < bank.size * bank.dim; ++j) sum += kernel[j] * window[j];
      map[i] = sum > 0.0 ? sum : 0.0;
    }
  }
  return maps;
}

double max_pool(const std::vector<double>& map, size_t* argmax) {
  if (map.empty()) throw EmptyMapError("max_pool over an empty feature map");
  size_t best = 0;
  for (size_t i = 1; i < map.size(); ++i) {
    if (map[i] > map[best]) best = i;  // first argmax wins on ties
  }
  if (argmax) *argmax = best;
  return map[best];
}

std::vector<double> dropout_mask(size_t n, double rate, Rng* rng, bool training) {
  std::vector<double> mask(n, 1.0);
  if (!training || rate == 0.0) return mask;
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must be in [0,1)");
  if (!rng) throw std::invalid_argument("training-mode dropout needs an rng");
  const double scale = 1.0 / (1.0 - rate);
  for (double& x : mask) x = rng->next_double() < rate ? 0.0 : scale;
  return mask;
}

void apply_dropout(std::vector<double>& values, double rate, Rng* rng, bool training) {
  auto mask = dropout_mask(values.size(), rate, rng, training);
  for (size_t i = 0; i < values.size(); ++i) values[i] *= mask[i];
}

ForwardCache forward(const CnnModel& model, const SentenceMatrix& input, bool training,
                     Rng* rng) {
  if (input.cols != model.config.embedding_dim)
    throw DataError("input embedding dim " + std::to_string(input.cols) +
                    " != model dim " + std::to_string(model.config.embedding_dim));
  ForwardCache cache;
  cache.training = training;
  cache.conv_input = input;
  apply_dropout(cache.conv_input.values, model.config.dropout1, rng, training);

  const size_t total_maps = model.flattened_width();
  cache.argmax.reserve(total_maps);
  cache.pooled.reserve(total_maps);
  for (const auto& bank : model.banks) {
    auto maps = conv_forward(cache.conv_input, bank);
    for (const auto& map : maps) {
      size_t arg = 0;
      cache.pooled.push_back(max_pool(map, &arg));
      cache.argmax.push_back(arg);
    }
  }

  cache.dropout2_mask = dropout_mask(total_maps, model.config.dropout2, rng, training);
  cache.fc_input.resize(total_maps);
  for (size_t i = 0; i < total_maps; ++i)
    cache.fc_input[i] = cache.pooled[i] * cache.dropout2_mask[i];

  for (int c = 0; c < 2; ++c) {
    double sum = model.fc_bias[static_cast<size_t>(c)];
    for (size_t i = 0; i < total_maps; ++i)
      sum += model.fc_weights[i * 2 + static_cast<size_t>(c)] * cache.fc_input[i];
    cache.logits[static_cast<size_t>(c)] = sum;
  }
  return cache;
}

double cross_entropy(const std::array<double, 2>& logits, int label) {
  double m = std::max(logits[0], logits[1]);
  double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return lse - logits[static_cast<size_t>(label)];
}

std::array<double, 2> softmax(const std::array<double, 2>& logits) {
  double m = std::max(logits[0], logits[1]);
  double e0 = std::exp(logits[0] - m);
  double e1 = std::exp(logits[1] - m);
  double z = e0 + e1;
  return {e0 / z, e1 / z};
}

CnnGradients backward(const CnnModel& model, ForwardCache& cache, int label) {
  if (cache.consumed) throw StaleCacheError("forward cache already consumed");
  cache.consumed = true;

  CnnGradients g = zero_gradients(model);
  auto sm = softmax(cache.logits);
  std::array<double, 2> dlogits{sm[0], sm[1]};
  dlogits[static_cast<size_t>(label)] -= 1.0;

  const size_t total_maps = model.flattened_width();
  g.fc_bias = dlogits;
  std::vector<double> dpool(total_maps);
  for (size_t i = 0; i < total_maps; ++i) {
    g.fc_weights[i * 2] = cache.fc_input[i] * dlogits[0];
    g.fc_weights[i * 2 + 1] = cache.fc_input[i] * dlogits[1];
    double dfc_in = model.fc_weights[i * 2] * dlogits[0] +
                    model.fc_weights[i * 2 + 1] * dlogits[1];
    dpool[i] = dfc_in * cache.dropout2_mask[i];
  }

  size_t map_idx = 0;
  for (size_t b = 0; b < model.banks.size(); ++b) {
    const auto& bank = model.banks[b];
    for (size_t k = 0; k < bank.n_filters; ++k, ++map_idx) {
      // pooled > 0 iff the selected pre-activation was positive; the ReLU
      // subgradient at exactly 0 is taken as 0
      if (cache.pooled[map_idx] <= 0.0) continue;
      double d = dpool[map_idx];
      if (d == 0.0) continue;
      size_t pos = cache.argmax[map_idx];
      g.biases[b][k] += d;
      double* kg = g.kernels[b].data() + k * bank.size * bank.dim;
      const double* window = cache.conv_input.values.data() + pos * cache.conv_input.cols;
      for (size_t j = 0; j < bank.size * bank.dim; ++j) kg[j] += d * window[j];
    }
  }
  return g;
}

namespace {

void adam_update_slice(double* p, const double* grad, double* m, double* v, size_t n,
                       uint64_t t, double lr, double beta1, double beta2, double eps) {
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size())
    throw std::invalid_argument("parameter/gradient size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  state.step_count++;
  adam_update_slice(params.data(), grads.data(), state.m.data(), state.v.data(),
                    params.size(), state.step_count, lr, state.beta1, state.beta2,
                    state.epsilon);
}

void adam_step(CnnModel& model, const CnnGradients& grads, AdamState& state, double lr) {
  if (state.m.empty()) {
    state.m.assign(model.parameter_count(), 0.0);
    state.v.assign(model.parameter_count(), 0.0);
  }
  state.step_count++;
  size_t off = 0;
  auto slice = [&](double* p, const double* g, size_t n) {
    adam_update_slice(p, g, state.m.data() + off, state.v.data() + off, n,
                      state.step_count, lr, state.beta1, state.beta2, state.epsilon);
    off += n;
  };
  for (size_t b = 0; b < model.banks.size(); ++b) {
    slice(model.banks[b].kernels.data(), grads.kernels[b].data(),
          model.banks[b].kernels.size());
    slice(model.banks[b].biases.data(), grads.biases[b].data(), model.banks[b].biases.size());
  }
  slice(model.fc_weights.data(), grads.fc_weights.data(), model.fc_weights.size());
  slice(model.fc_bias.data(), grads.fc_bias.data(), model.fc_bias.size());
}

namespace {

void validate_config(const CnnConfig& cfg) {
  if (cfg.filter_width < 2) throw std::invalid_argument("filter_width must be >= 2");
  if (cfg.n_filters < 1) throw std::invalid_argument("n_filters must be >= 1");
  if (!(cfg.dropout1 >= 0.0 && cfg.dropout1 < 1.0) ||
      !(cfg.dropout2 >= 0.0 && cfg.dropout2 < 1.0))
    throw std::invalid_argument("dropout rates must be in [0,1)");
  if (cfg.max_length != 0 && cfg.max_length < cfg.filter_width + 1)
    throw std::invalid_argument("max_length must be >= filter_width + 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
}

// kernels and FC weights from rng, biases zero; filter sizes ascending
CnnModel init_model(const CnnConfig& cfg, Rng& rng, double init_range) {
  CnnModel model;
  model.config = cfg;
  for (size_t s : {cfg.filter_width - 1, cfg.filter_width, cfg.filter_width + 1}) {
    FilterBank bank;
    bank.size = s;
    bank.n_filters = cfg.n_filters;
    bank.dim = cfg.embedding_dim;
    bank.kernels.resize(cfg.n_filters * s * cfg.embedding_dim);
    for (double& w : bank.kernels) w = rng.next_uniform(-init_range, init_range);
    bank.biases.assign(cfg.n_filters, 0.0);
    model.banks.push_back(std::move(bank));
  }
  model.fc_weights.resize(3 * cfg.n_filters * 2);
  for (double& w : model.fc_weights) w = rng.next_uniform(-init_range, init_range);
  model.fc_bias = {0.0, 0.0};
  return model;
}

double mean_inference_loss(const CnnModel& model, const std::vector<CnnExample>& examples,
                           const std::vector<size_t>& idx) {
  double sum = 0.0;
  for (size_t i : idx) {
    auto cache = forward(model, examples[i].matrix, false, nullptr);
    sum += cross_entropy(cache.logits, label_index(examples[i].label));
  }
  return sum / static_cast<double>(idx.size());
}

}  // namespace

CnnModel train_cnn(const std::vector<CnnExample>& train, const CnnConfig& config,
                   TrainingReport* report) {
  if (train.empty()) throw DataError("empty training set");
  CnnConfig cfg = config;
  if (cfg.max_length == 0) cfg.max_length = train.front().matrix.rows;
  validate_config(cfg);
  for (const auto& ex : train) {
    if (ex.matrix.rows != cfg.max_length || ex.matrix.cols != cfg.embedding_dim)
      throw DataError("training matrix shape does not match config");
  }
  std::array<size_t, 2> class_counts{0, 0};
  for (const auto& ex : train) class_counts[static_cast<size_t>(label_index(ex.label))]++;
  if (class_counts[0] == 0 || class_counts[1] == 0)
    throw SingleClassError("training data contains a single class");

  // fixed derived streams: init, validation split, epoch shuffles, dropout
  Rng r_init(mix_seed(cfg.seed, 1));
  Rng r_split(mix_seed(cfg.seed, 2));
  Rng r_shuffle(mix_seed(cfg.seed, 3));
  Rng r_drop(mix_seed(cfg.seed, 4));

  CnnModel model = init_model(cfg, r_init, 0.05);

  // class-stratified 10% validation split
  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < train.size(); ++i)
    by_class[static_cast<size_t>(label_index(train[i].label))].push_back(i);
  std::vector<size_t> val_idx, train_idx;
  for (auto& cls : by_class) {
    r_split.shuffle(cls);
    size_t n_val = cls.size() / 10;
    if (n_val == 0 && cls.size() >= 2) n_val = 1;
    for (size_t i = 0; i < cls.size(); ++i)
      (i < n_val ? val_idx : train_idx).push_back(cls[i]);
  }
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  TrainingReport rep;
  rep.resolved_length = cfg.max_length;

  AdamState adam;
  CnnModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  size_t epochs_without_improvement = 0;

  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    r_shuffle.shuffle(train_idx);
    double loss_sum = 0.0;
    for (size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      size_t end = std::min(start + cfg.batch_size, train_idx.size());
      CnnGradients total = zero_gradients(model);
      for (size_t i = start; i < end; ++i) {
        const auto& ex = train[train_idx[i]];
        auto cache = forward(model, ex.matrix, true, &r_drop);
        loss_sum += cross_entropy(cache.logits, label_index(ex.label));
        total.accumulate(backward(model, cache, label_index(ex.label)));
      }
      total.scale(1.0 / static_cast<double>(end - start));
      adam_step(model, total, adam, cfg.learning_rate);
    }
    rep.train_losses.push_back(loss_sum / static_cast<double>(train_idx.size()));
    rep.stopped_epoch = epoch;

    if (val_idx.empty()) {
      // no validation data: keep the latest parameters, no early stopping
      rep.val_losses.push_back(std::numeric_limits<double>::quiet_NaN());
      best = model;
      rep.best_epoch = epoch;
      continue;
    }
    double val_loss = mean_inference_loss(model, train, val_idx);
    rep.val_losses.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best = model;
      rep.best_epoch = epoch;
      epochs_without_improvement = 0;
    } else {
      epochs_without_improvement++;
      if (epochs_without_improvement > cfg.patience) break;
    }
  }

  best.config = cfg;
  if (report) *report = rep;
  return best;
}

size_t resolve_max_length(const std::vector<LabeledInstance>& instances,
                          const CnnConfig& config) {
  std::vector<size_t> lengths;
  lengths.reserve(instances.size());
  for (const auto& inst : instances) lengths.push_back(inst.tokens.size());
  if (lengths.empty()) throw DataError("cannot derive max_length from an empty corpus");
  std::sort(lengths.begin(), lengths.end());
  size_t idx = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(lengths.size())));
  if (idx > 0) idx -= 1;  // nearest-rank 95th percentile
  size_t L = lengths[idx];
  L = std::min<size_t>(L, 100);
  return std::max<size_t>(L, config.filter_width + 1);
}

std::vector<CnnExample> embed_corpus(const std::vector<LabeledInstance>& instances,
                                     const EmbeddingTable& embeddings, size_t max_length) {
  std::vector<CnnExample> out;
  out.reserve(instances.size());
  for (const auto& inst : instances)
    out.push_back({embed_sentence(inst.tokens, embeddings, max_length), inst.label});
  return out;
}

CnnModel train_cnn_on_corpus(const std::vector<LabeledInstance>& instances,
                             const EmbeddingTable& embeddings, const CnnConfig& config,
                             TrainingReport* report) {
  CnnConfig cfg = config;
  cfg.embedding_dim = embeddings.dim();
  if (cfg.max_length == 0) cfg.max_length = resolve_max_length(instances, cfg);
  auto examples = embed_corpus(instances, embeddings, cfg.max_length);
  return train_cnn(examples, cfg, report);
}

std::pair<Label, std::array<double, 2>> predict_cnn(const CnnModel& model,
                                                    const SentenceMatrix& input) {
  auto cache = forward(model, input, false, nullptr);
  auto proba = softmax(cache.logits);
  Label label = proba[0] > proba[1] ? Label::Laughter : Label::NoLaughter;
  return {label, proba};
}

namespace {

json config_to_json(const CnnConfig& c) {
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

CnnConfig config_from_json(const json& j) {
  CnnConfig c;
  c.filter_width = j.at("filter_width").get<size_t>();
  c.n_filters = j.at("n_filters").get<size_t>();
  c.dropout1 = j.at("dropout1").get<double>();
  c.dropout2 = j.at("dropout2").get<double>();
  c.max_length = j.at("max_length").get<size_t>();
  c.embedding_dim = j.at("embedding_dim").get<size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<size_t>();
  c.max_epochs = j.at("max_epochs").get<size_t>();
  c.patience = j.at("patience").get<size_t>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

}  // namespace

void save_cnn(const CnnModel& model, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "cnn";
  j["config"] = config_to_json(model.config);
  json banks = json::array();
  for (const auto& bank : model.banks) {
    json kernels = json::array();
    for (size_t k = 0; k < bank.n_filters; ++k) {
      json kernel = json::array();
      for (size_t r = 0; r < bank.size; ++r) {
        json row = json::array();
        for (size_t c = 0; c < bank.dim; ++c) row.push_back(bank.kernel_at(k, r, c));
        kernel.push_back(std::move(row));
      }
      kernels.push_back(std::move(kernel));
    }
    banks.push_back(json{{"size", bank.size}, {"kernels", std::move(kernels)},
                         {"biases", bank.biases}});
  }
  json fc = json::array();
  for (size_t i = 0; i < model.fc_weights.size() / 2; ++i)
    fc.push_back(json::array({model.fc_weights[i * 2], model.fc_weights[i * 2 + 1]}));
  j["parameters"] = {{"banks", std::move(banks)},
                     {"fc_weights", std::move(fc)},
                     {"fc_bias", model.fc_bias}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump() << "\n";
}

CnnModel load_cnn(const std::string& path) {
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
    if (j.at("kind").get<std::string>() != "cnn")
      throw DataError(path + ": not a cnn model");
    CnnModel model;
    model.config = config_from_json(j.at("config"));
    const json& params = j.at("parameters");
    for (const auto& jb : params.at("banks")) {
      FilterBank bank;
      bank.size = jb.at("size").get<size_t>();
      bank.dim = model.config.embedding_dim;
      const json& kernels = jb.at("kernels");
      bank.n_filters = kernels.size();
      for (const auto& kernel : kernels) {
        if (kernel.size() != bank.size) throw DataError(path + ": kernel row count mismatch");
        for (const auto& row : kernel) {
          if (row.size() != bank.dim) throw DataError(path + ": kernel width mismatch");
          for (const auto& x : row) bank.kernels.push_back(x.get<double>());
        }
      }
      bank.biases = jb.at("biases").get<std::vector<double>>();
      if (bank.biases.size() != bank.n_filters)
        throw DataError(path + ": bias count mismatch");
      model.banks.push_back(std::move(bank));
    }
    if (model.banks.size() != 3) throw DataError(path + ": expected 3 filter banks");
    for (const auto& row : params.at("fc_weights")) {
      model.fc_weights.push_back(row.at(0).get<double>());
      model.fc_weights.push_back(row.at(1).get<double>());
    }
    if (model.fc_weights.size() != model.flattened_width() * 2)
      throw DataError(path + ": fc weight shape mismatch");
    model.fc_bias = j.at("parameters").at("fc_bias").get<std::array<double, 2>>();
    return model;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_training_report(const TrainingReport& report, const std::string& path) {
  json epochs = json::array();
  for (size_t i = 0; i < report.train_losses.size(); ++i) {
    json e;
    e["epoch"] = i + 1;
    e["train_loss"] = report.train_losses[i];
    double v = report.val_losses[i];
    if (std::isnan(v))
      e["val_loss"] = nullptr;
    else
      e["val_loss"] = v;
    epochs.push_back(std::move(e));
  }
  json j;
  j["epochs"] = std::move(epochs);
  j["stopped_epoch"] = report.stopped_epoch;
  j["best_epoch"] = report.best_epoch;
  j["max_length"] = report.resolved_length;
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

namespace {

// parameter pointers in the fixed flat order shared with adam_step
std::vector<double*> parameter_views(CnnModel& model) {
  std::vector<double*> out;
  out.reserve(model.parameter_count());
  for (auto& bank : model.banks) {
    for (double& w : bank.kernels) out.push_back(&w);
    for (double& b : bank.biases) out.push_back(&b);
  }
  for (double& w : model.fc_weights) out.push_back(&w);
  out.push_back(&model.fc_bias[0]);
  out.push_back(&model.fc_bias[1]);
  return out;
}

std::vector<double> flatten_gradients(const CnnGradients& g) {
  std::vector<double> out;
  for (size_t b = 0; b < g.kernels.size(); ++b) {
    out.insert(out.end(), g.kernels[b].begin(), g.kernels[b].end());
    out.insert(out.end(), g.biases[b].begin(), g.biases[b].end());
  }
  out.insert(out.end(), g.fc_weights.begin(), g.fc_weights.end());
  out.push_back(g.fc_bias[0]);
  out.push_back(g.fc_bias[1]);
  return out;
}

}  // namespace

GradCheckResult gradient_check(const CnnConfig& config, uint64_t seed,
                               size_t sample_params, double epsilon) {
  CnnConfig cfg = config;
  if (cfg.max_length == 0) cfg.max_length = 10;
  validate_config(cfg);

  // larger-than-training init and a bias offset keep pre-activations away
  // from the ReLU kink, where a finite-difference probe is meaningless
  Rng r_init(mix_seed(seed, 11));
  CnnModel model = init_model(cfg, r_init, 0.5);
  for (auto& bank : model.banks)
    for (double& b : bank.biases) b = r_init.next_uniform(-0.3, 0.3);
  model.fc_bias = {r_init.next_uniform(-0.3, 0.3), r_init.next_uniform(-0.3, 0.3)};

  SentenceMatrix input;
  input.rows = cfg.max_length;
  input.cols = cfg.embedding_dim;
  input.true_length = cfg.max_length;
  input.values.resize(input.rows * input.cols);
  Rng r_input(mix_seed(seed, 12));
  for (double& x : input.values) x = r_input.next_uniform(-1.0, 1.0);

  const int label = 0;
  const uint64_t mask_seed = mix_seed(seed, 13);
  auto loss_at = [&](const CnnModel& m) {
    Rng r(mask_seed);  // identical dropout masks for every evaluation
    auto cache = forward(m, input, true, &r);
    return cross_entropy(cache.logits, label);
  };

  std::vector<double> analytic;
  {
    Rng r(mask_seed);
    auto cache = forward(model, input, true, &r);
    analytic = flatten_gradients(backward(model, cache, label));
  }
  auto views = parameter_views(model);

  std::vector<size_t> indices(views.size());
  for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  if (sample_params != 0 && sample_params < indices.size()) {
    Rng r_pick(mix_seed(seed, 14));
    r_pick.shuffle(indices);
    indices.resize(sample_params);
  }

  GradCheckResult result;
  for (size_t idx : indices) {
    double* p = views[idx];
    const double orig = *p;
    *p = orig + epsilon;
    double lp = loss_at(model);
    *p = orig - epsilon;
    double lm = loss_at(model);
    *p = orig;
    double numeric = (lp - lm) / (2.0 * epsilon);
    double ga = analytic[idx];
    double denom = std::max(std::fabs(ga), std::fabs(numeric));
    double rel = denom > 1e-8 ? std::fabs(ga - numeric) / denom : std::fabs(ga - numeric);
    result.max_rel_error = std::max(result.max_rel_error, rel);
    result.checked++;
  }
  return result;
}

}  // namespace humor
