#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "humor/corpus.hpp"
#include "humor/resources.hpp"
#include "humor/rng.hpp"

namespace humor {

// Sentence classifier: L x d embedding tensor -> 1D convolutions with filter
// sizes {f_w-1, f_w, f_w+1} (n_f maps each) -> max pooling -> FC -> 2 logits,
// with inverted dropout at the convolution input and at the FC input.
struct CnnConfig {
  size_t filter_width = 6;     // f_w; the three filter sizes bracket it
  size_t n_filters = 100;      // n_f per size
  double dropout1 = 0.7;       // drop rate at convolution input
  double dropout2 = 0.35;      // drop rate at FC input
  size_t max_length = 0;       // L; 0 derives it from the training sentences
  size_t embedding_dim = 300;  // d
  double learning_rate = 0.001;
  size_t batch_size = 50;
  size_t max_epochs = 100;
  size_t patience = 5;  // epochs without validation improvement
  uint64_t seed = 0;
};

struct SentenceMatrix {
  size_t rows = 0;  // L
  size_t cols = 0;  // d
  std::vector<double> values;  // row-major; rows >= true_length are zero
  size_t true_length = 0;

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
};

// n_f kernels of shape size x d plus one bias each
struct FilterBank {
  size_t size = 0;
  size_t n_filters = 0;
  size_t dim = 0;
  std::vector<double> kernels;  // n_filters * size * dim, row-major per kernel
  std::vector<double> biases;   // n_filters

  double kernel_at(size_t k, size_t r, size_t c) const {
    return kernels[(k * size + r) * dim + c];
  }
};

struct CnnModel {
  CnnConfig config;
  std::vector<FilterBank> banks;    // ascending filter size
  std::vector<double> fc_weights;   // (3*n_f) x 2, row-major
  std::array<double, 2> fc_bias{0.0, 0.0};

  size_t flattened_width() const { return 3 * config.n_filters; }
  size_t parameter_count() const;
};

struct CnnGradients {
  std::vector<std::vector<double>> kernels;  // per bank
  std::vector<std::vector<double>> biases;   // per bank
  std::vector<double> fc_weights;
  std::array<double, 2> fc_bias{0.0, 0.0};

  void accumulate(const CnnGradients& other);
  void scale(double factor);
};

CnnGradients zero_gradients(const CnnModel& model);

struct AdamState {
  uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> m;  // first moments, flat parameter order
  std::vector<double> v;  // second moments
};

// first min(len, L) rows are the token vectors in order (OOV rows zero),
// the rest is zero padding; overlong sentences are truncated at L
SentenceMatrix embed_sentence(const std::vector<std::string>& tokens,
                              const EmbeddingTable& embeddings, size_t max_length);

// valid convolution + ReLU; maps[k][i] for window starting at row i,
// map length rows - size + 1
std::vector<std::vector<double>> conv_forward(const SentenceMatrix& input,
                                              const FilterBank& bank);

// maximum element; *argmax (when given) receives the first maximising index,
// which is also where the backward pass routes the gradient
double max_pool(const std::vector<double>& map, size_t* argmax = nullptr);

// per-component scale factors: 0 with probability rate, else 1/(1-rate);
// all-ones when not training or rate == 0
std::vector<double> dropout_mask(size_t n, double rate, Rng* rng, bool training);
void apply_dropout(std::vector<double>& values, double rate, Rng* rng, bool training);

struct ForwardCache {
  SentenceMatrix conv_input;          // embedding matrix after dropout1
  std::vector<size_t> argmax;         // per map, 3*n_f entries
  std::vector<double> pooled;         // post-ReLU max per map
  std::vector<double> dropout2_mask;  // scale factors at the FC input
  std::vector<double> fc_input;       // pooled * mask
  std::array<double, 2> logits{0.0, 0.0};
  bool training = false;
  bool consumed = false;
};

// rng is only drawn from in training mode; flatten order is ascending filter
// size then filter index
ForwardCache forward(const CnnModel& model, const SentenceMatrix& input, bool training,
                     Rng* rng);

// softmax + negative log-likelihood in log-sum-exp form; label is the class
// index (0 = Laughter, 1 = NoLaughter)
double cross_entropy(const std::array<double, 2>& logits, int label);

std::array<double, 2> softmax(const std::array<double, 2>& logits);

// exact reverse-mode gradients under the masks recorded in cache; a cache may
// be consumed once
CnnGradients backward(const CnnModel& model, ForwardCache& cache, int label);

// bias-corrected Adam on a flat parameter vector; step_count advances once
// per call
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double lr);
// same update applied to the model's tensors in fixed flat order
void adam_step(CnnModel& model, const CnnGradients& grads, AdamState& state, double lr);

struct TrainingReport {
  std::vector<double> train_losses;  // per epoch, mean per example
  std::vector<double> val_losses;
  size_t stopped_epoch = 0;  // 1-based
  size_t best_epoch = 0;
  size_t resolved_length = 0;  // the L actually used
};

struct CnnExample {
  SentenceMatrix matrix;
  Label label = Label::NoLaughter;
};

// Seeded init U[-0.05, 0.05] (biases zero), class-stratified 10% validation
// split, shuffled mini-batches with mean-reduced gradients and Adam, early
// stopping on validation loss with the configured patience; returns the
// best-validation-epoch parameters.
CnnModel train_cnn(const std::vector<CnnExample>& train, const CnnConfig& config,
                   TrainingReport* report = nullptr);

// 95th-percentile training sentence length, capped at 100 and floored at
// f_w + 1; used when config.max_length is 0
size_t resolve_max_length(const std::vector<LabeledInstance>& instances,
                          const CnnConfig& config);

std::vector<CnnExample> embed_corpus(const std::vector<LabeledInstance>& instances,
                                     const EmbeddingTable& embeddings, size_t max_length);

// resolves L if needed, embeds, trains
CnnModel train_cnn_on_corpus(const std::vector<LabeledInstance>& instances,
                             const EmbeddingTable& embeddings, const CnnConfig& config,
                             TrainingReport* report = nullptr);

// inference-mode forward; proba = softmax(logits), argmax label with ties
// going to NoLaughter
std::pair<Label, std::array<double, 2>> predict_cnn(const CnnModel& model,
                                                    const SentenceMatrix& input);

void save_cnn(const CnnModel& model, const std::string& path);
CnnModel load_cnn(const std::string& path);
void save_training_report(const TrainingReport& report, const std::string& path);

struct GradCheckResult {
  double max_rel_error = 0.0;
  size_t checked = 0;
};

// Central finite differences (epsilon 1e-5) against backward() on a seeded
// random model and input, dropout masks held fixed across evaluations.
// Checks every parameter when sample_params is 0.
GradCheckResult gradient_check(const CnnConfig& config, uint64_t seed,
                               size_t sample_params = 0, double epsilon = 1e-5);

}  // namespace humor
