#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "humor/corpus.hpp"
#include "humor/resources.hpp"

namespace humor {

// Fixed feature layout: incongruity(2) | ambiguity(6) | interpersonal(4) |
// phonetic(4) | knn(5) | averaged embedding(dim). With the reference 300-d
// table the vector is 321 wide.
constexpr size_t kIncongruityWidth = 2;
constexpr size_t kAmbiguityWidth = 6;
constexpr size_t kInterpersonalWidth = 4;
constexpr size_t kPhoneticWidth = 4;
constexpr size_t kKnnWidth = 5;
constexpr size_t kStructuralWidth =
    kIncongruityWidth + kAmbiguityWidth + kInterpersonalWidth + kPhoneticWidth + kKnnWidth;
constexpr size_t kReferenceEmbeddingDim = 300;
constexpr size_t kReferenceFeatureWidth = kStructuralWidth + kReferenceEmbeddingDim;  // 321

inline size_t feature_width(size_t embedding_dim) { return kStructuralWidth + embedding_dim; }

struct InstanceId {
  std::string talk_id;
  size_t sent_idx = 0;
  bool operator==(const InstanceId& o) const {
    return sent_idx == o.sent_idx && talk_id == o.talk_id;
  }
};

inline InstanceId id_of(const LabeledInstance& inst) { return {inst.talk_id, inst.sent_idx}; }

// What the kNN block is allowed to see: averaged-embedding vectors and labels
// of the training fold, nothing else.
struct TrainReference {
  std::vector<std::vector<double>> vectors;
  std::vector<Label> labels;
  std::vector<InstanceId> ids;
  size_t size() const { return vectors.size(); }
};

TrainReference build_train_reference(const std::vector<LabeledInstance>& instances,
                                     const EmbeddingTable& embeddings);

// max / min of (1 - cosine) over all position pairs of tokens with a nonzero
// in-vocabulary vector; fewer than two such tokens gives (0, 0)
std::array<double, 2> incongruity_features(const std::vector<std::string>& tokens,
                                           const EmbeddingTable& embeddings);

// (sum of log sense counts, max count, mean count) over in-inventory token
// occurrences, then (max, min, mean) of the stored similarities over pairs of
// distinct word types; absent data contributes 0
std::array<double, 6> ambiguity_features(const std::vector<std::string>& tokens,
                                         const SenseInventory& senses);

// occurrence counts: positive, negative, weak-subjective, strong-subjective
std::array<double, 4> interpersonal_features(const std::vector<std::string>& tokens,
                                             const SubjectivityLexicon& lexicon);

// alliteration chain count / max length, rhyme chain count / max length.
// A chain is a maximal run (sentence order, out-of-dictionary tokens skipped)
// of >= 2 words sharing the first phoneme, resp. the final phoneme pair,
// stress digits stripped.
std::array<double, 4> phonetic_features(const std::vector<std::string>& tokens,
                                        const PhoneticDictionary& phones);

// labels (Laughter=1) of the k nearest reference rows by Euclidean distance,
// nearest first, distance ties broken by ordinal, zero-padded below k;
// exclude suppresses the row with that id (self-exclusion during training)
std::array<double, 5> knn_label_features(const std::vector<double>& query,
                                         const TrainReference& reference, size_t k = 5,
                                         const InstanceId* exclude = nullptr);

// component-wise mean over in-vocabulary token vectors; zero vector if none
std::vector<double> avg_embedding(const std::vector<std::string>& tokens,
                                  const EmbeddingTable& embeddings);

// all blocks concatenated in layout order; the instance never appears in its
// own neighbour list
std::vector<double> extract_features(const LabeledInstance& instance, const Resources& res,
                                     const TrainReference& reference, size_t k = 5);

struct FeatureMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;  // row-major
  std::vector<Label> labels;

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
};

FeatureMatrix extract_matrix(const std::vector<LabeledInstance>& instances,
                             const Resources& res, const TrainReference& reference,
                             size_t k = 5, unsigned jobs = 1);

std::vector<std::string> feature_column_names(size_t embedding_dim);

// CSV with a header naming every column plus a trailing label column.
void save_feature_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_feature_csv(const std::string& path);

// Little-endian float64, row-major, with a JSON sidecar holding the shape
// and labels.
void save_feature_binary(const FeatureMatrix& m, const std::string& data_path,
                         const std::string& sidecar_path);
FeatureMatrix load_feature_binary(const std::string& data_path,
                                  const std::string& sidecar_path);

}  // namespace humor
