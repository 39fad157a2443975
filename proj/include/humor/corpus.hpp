#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "humor/errors.hpp"
#include "humor/text.hpp"

namespace humor {

enum class Label { Laughter = 0, NoLaughter = 1 };

inline int label_index(Label l) { return l == Label::Laughter ? 0 : 1; }

std::string label_to_string(Label l);
Label label_from_string(const std::string& s);

struct RawSentence {
  size_t index = 0;  // 0-based position within the talk
  std::string text;  // markers stripped
  bool contains_marker = false;
  bool followed_by_marker = false;

  bool laughter() const { return contains_marker || followed_by_marker; }
};

struct Talk {
  std::string talk_id;
  std::vector<RawSentence> sentences;
};

struct LabeledInstance {
  std::string talk_id;
  size_t sent_idx = 0;
  std::vector<std::string> tokens;  // lowercased
  std::string text;
  Label label = Label::NoLaughter;
  std::optional<size_t> pair_idx;  // negatives only: the paired positive's index
};

struct Corpus {
  std::vector<LabeledInstance> instances;  // sorted by (talk_id, sent_idx)
  size_t window = 7;
  uint64_t seed = 0;
};

struct BuildReport {
  size_t talks = 0;
  size_t sentences = 0;
  size_t positives_found = 0;
  size_t pairs_made = 0;
  size_t dropped_positives = 0;
  size_t window = 7;
  uint64_t seed = 0;
};

struct FoldPlan {
  size_t k = 0;
  uint64_t seed = 0;
  std::vector<std::vector<size_t>> folds;  // instance ordinals into the corpus
};

// Segments a whole-talk transcript; every "(Laughter)" sets exactly one
// sentence's contains/followed flag and all markers are stripped.
Talk parse_transcript(const std::string& talk_id, const std::string& text);

// One negative per laughter sentence, drawn from the +-window neighbourhood
// within the same talk: nearest distance first, preceding before following at
// equal distance; laughter-labelled, token-free and already-used sentences are
// skipped. Positives with an exhausted window are dropped (counted in the
// report) so the class balance is exact. Output is sorted by
// (talk_id, sent_idx). The selection itself is deterministic; the seed is
// recorded for provenance. Throws EmptyCorpusError when no pair can be made.
Corpus sample_balanced(const std::vector<Talk>& talks, size_t window, uint64_t seed,
                       BuildReport* report = nullptr);

// Disjoint, exhaustive split. When group_by_talk, whole talks are dealt to the
// dev side (seeded shuffle) until it reaches dev_fraction of the instances.
std::pair<Corpus, Corpus> split_dev_cv(const Corpus& corpus, double dev_fraction,
                                       bool group_by_talk, uint64_t seed);

// k disjoint, exhaustive folds; when grouped every talk lands in exactly one
// fold and talk counts per fold differ by at most one (seeded shuffle, dealt
// round-robin). Throws TooFewGroupsError when there are fewer groups than k.
FoldPlan make_folds(const Corpus& cv, size_t k, bool group_by_talk, uint64_t seed);

// JSON-lines corpus file: one object per instance with keys talk_id,
// sent_idx, text, tokens, label, pair_idx (negatives only).
void save_corpus_jsonl(const Corpus& corpus, const std::string& path);
Corpus load_corpus_jsonl(const std::string& path);

void save_fold_plan(const FoldPlan& plan, const std::string& path);
FoldPlan load_fold_plan(const std::string& path);

void save_build_report(const BuildReport& report, const std::string& path);

}  // namespace humor
