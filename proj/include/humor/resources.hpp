#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "humor/errors.hpp"

namespace humor {

// How lookups of unknown words resolve. ZeroVector keeps averaged features
// and padded CNN rows consistent on unknowns; the knob exists so another
// policy can be added without touching call sites.
enum class OovPolicy { ZeroVector };

// Word vectors loaded from a text table ("word c1 ... c_dim", optional
// "<count> <dim>" header). Lookup is total: out-of-vocabulary words map to
// the policy vector.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(size_t dim) : dim_(dim), zero_(dim, 0.0) {}

  size_t dim() const { return dim_; }
  size_t size() const { return entries_.size(); }
  OovPolicy oov_policy() const { return oov_policy_; }

  bool contains(const std::string& word) const { return entries_.count(word) > 0; }

  const std::vector<double>& lookup(const std::string& word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? zero_ : it->second;
  }

  // duplicate words: last one wins
  void insert(const std::string& word, std::vector<double> vec);

  const std::unordered_map<std::string, std::vector<double>>& entries() const {
    return entries_;
  }

 private:
  size_t dim_ = 0;
  OovPolicy oov_policy_ = OovPolicy::ZeroVector;
  std::vector<double> zero_;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

EmbeddingTable load_embeddings(const std::string& path, size_t expected_dim);
// full-precision writer; reloading reproduces the table exactly
void save_embeddings(const EmbeddingTable& table, const std::string& path);

// ARPABET-style pronunciations, primary pronunciation only; word matching is
// case-insensitive.
class PhoneticDictionary {
 public:
  bool contains(const std::string& word) const;
  // empty list when unknown
  const std::vector<std::string>& lookup(const std::string& word) const;
  void insert(const std::string& word, std::vector<std::string> phones);
  size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::vector<std::string> empty_;
};

// Lines "WORD  PH1 PH2 ..."; ";;;" comments; alternates "WORD(2)" skipped.
PhoneticDictionary load_phonetic_dict(const std::string& path);

// Word sense counts plus a precomputed symmetric word-pair similarity table.
class SenseInventory {
 public:
  bool has_count(const std::string& word) const { return counts_.count(word) > 0; }
  int sense_count(const std::string& word) const;
  // similarity in [0,1]; unknown pairs 0; (w,w) is 1 for any known word
  double pair_similarity(const std::string& a, const std::string& b) const;
  bool has_pair(const std::string& a, const std::string& b) const;

  void set_count(const std::string& word, int count);
  void set_similarity(const std::string& a, const std::string& b, double sim);

  size_t count_entries() const { return counts_.size(); }
  size_t pair_entries() const { return sims_.size(); }

 private:
  bool known(const std::string& word) const;
  static std::string pair_key(const std::string& a, const std::string& b);

  std::unordered_map<std::string, int> counts_;
  std::unordered_map<std::string, double> sims_;
  std::unordered_map<std::string, bool> words_in_pairs_;
};

struct SubjectivityEntry {
  enum class Polarity { Positive, Negative, Neutral };
  enum class Strength { Weak, Strong };
  Polarity polarity = Polarity::Neutral;
  Strength strength = Strength::Weak;
};

class SubjectivityLexicon {
 public:
  bool contains(const std::string& word) const { return entries_.count(word) > 0; }
  const SubjectivityEntry* lookup(const std::string& word) const;
  void insert(const std::string& word, SubjectivityEntry entry) {
    entries_[word] = entry;
  }
  size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, SubjectivityEntry> entries_;
};

// CSV "word,polarity,strength"
SubjectivityLexicon load_subjectivity(const std::string& path);
// CSVs "word,sense_count" and "word1,word2,similarity"
SenseInventory load_senses(const std::string& counts_path, const std::string& similarity_path);

// Everything feature extraction needs, by const pointer; null means absent.
struct Resources {
  const EmbeddingTable* embeddings = nullptr;
  const PhoneticDictionary* phones = nullptr;
  const SenseInventory* senses = nullptr;
  const SubjectivityLexicon* subjectivity = nullptr;
};

}  // namespace humor
