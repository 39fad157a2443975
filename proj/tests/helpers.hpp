#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "humor/corpus.hpp"
#include "humor/resources.hpp"
#include "humor/rng.hpp"

namespace fixtures {

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// embedding fixture from the hand-worked incongruity example
inline humor::EmbeddingTable tiny_embeddings() {
  humor::EmbeddingTable t(2);
  t.insert("a", {1.0, 0.0});
  t.insert("b", {0.0, 1.0});
  t.insert("c", {1.0, 0.0});
  return t;
}

inline humor::PhoneticDictionary tiny_phones() {
  humor::PhoneticDictionary d;
  d.insert("peter", {"P", "IY1", "T", "ER0"});
  d.insert("piper", {"P", "AY1", "P", "ER0"});
  d.insert("picked", {"P", "IH1", "K", "T"});
  d.insert("peppers", {"P", "EH1", "P", "ER0", "Z"});
  d.insert("cat", {"K", "AE", "T"});
  d.insert("bat", {"B", "AE", "T"});
  return d;
}

inline humor::SenseInventory tiny_senses() {
  humor::SenseInventory s;
  s.set_count("bank", 3);
  s.set_count("bat", 2);
  s.set_count("cat", 1);
  s.set_similarity("bank", "shore", 0.4);
  return s;
}

inline humor::SubjectivityLexicon tiny_subjectivity() {
  humor::SubjectivityLexicon lex;
  humor::SubjectivityEntry great{humor::SubjectivityEntry::Polarity::Positive,
                                 humor::SubjectivityEntry::Strength::Strong};
  humor::SubjectivityEntry awful{humor::SubjectivityEntry::Polarity::Negative,
                                 humor::SubjectivityEntry::Strength::Strong};
  humor::SubjectivityEntry maybe{humor::SubjectivityEntry::Polarity::Neutral,
                                 humor::SubjectivityEntry::Strength::Weak};
  lex.insert("great", great);
  lex.insert("awful", awful);
  lex.insert("maybe", maybe);
  return lex;
}

// deterministic pseudo-random vector per word
inline std::vector<double> hashed_vector(const std::string& word, size_t dim,
                                         double scale = 0.5) {
  humor::Rng rng(humor::mix_seed(fnv1a(word), 99));
  std::vector<double> v(dim);
  for (double& x : v) x = rng.next_uniform(-scale, scale);
  return v;
}

inline std::vector<std::string> filler_vocab(size_t n = 100) {
  std::vector<std::string> vocab;
  for (size_t i = 0; i < n; ++i) vocab.push_back("w" + std::to_string(i));
  return vocab;
}

// fillers get hashed vectors; the planted cue token gets a strong direction
inline humor::EmbeddingTable synthetic_embeddings(size_t dim = 300) {
  humor::EmbeddingTable t(dim);
  for (const auto& w : filler_vocab()) t.insert(w, hashed_vector(w, dim));
  std::vector<double> cue = hashed_vector("zinger", dim, 0.1);
  for (size_t i = 0; i < 10 && i < dim; ++i) cue[i] = 1.5;
  t.insert("zinger", cue);
  return t;
}

// Talks alternating plain sentences with cue-bearing laughter sentences.
// sample_balanced on these yields n_talks * positives_per_talk pairs.
inline std::vector<humor::Talk> separable_talks(size_t n_talks, size_t positives_per_talk,
                                                uint64_t seed) {
  auto vocab = filler_vocab();
  std::vector<humor::Talk> talks;
  humor::Rng rng(seed);
  for (size_t t = 0; t < n_talks; ++t) {
    humor::Talk talk;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "talk%03zu", t);
    talk.talk_id = buf;
    size_t idx = 0;
    for (size_t p = 0; p < positives_per_talk; ++p) {
      for (int kind = 0; kind < 2; ++kind) {
        humor::RawSentence s;
        s.index = idx++;
        size_t n_tokens = 8 + rng.next_below(4);
        std::vector<std::string> words;
        for (size_t w = 0; w < n_tokens; ++w)
          words.push_back(vocab[rng.next_below(vocab.size())]);
        if (kind == 1) {
          words[rng.next_below(words.size())] = "zinger";
          s.contains_marker = true;
        }
        std::string text;
        for (size_t w = 0; w < words.size(); ++w) {
          if (w) text += " ";
          text += words[w];
        }
        s.text = text + ".";
        talk.sentences.push_back(std::move(s));
      }
    }
    talks.push_back(std::move(talk));
  }
  return talks;
}

// unconstrained random talks for the corpus property suite
inline std::vector<humor::Talk> random_talks(humor::Rng& rng, size_t n_talks,
                                             size_t id_offset = 0) {
  auto vocab = filler_vocab(20);
  std::vector<humor::Talk> talks;
  for (size_t t = 0; t < n_talks; ++t) {
    humor::Talk talk;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "r%05zu", id_offset + t);
    talk.talk_id = buf;
    size_t n_sentences = 2 + rng.next_below(28);
    for (size_t i = 0; i < n_sentences; ++i) {
      humor::RawSentence s;
      s.index = i;
      size_t n_tokens = rng.next_below(9);  // 0 makes token-free sentences
      std::string text;
      for (size_t w = 0; w < n_tokens; ++w) {
        if (w) text += " ";
        text += vocab[rng.next_below(vocab.size())];
      }
      if (text.empty()) text = "?!";
      s.text = text;
      if (rng.next_double() < 0.25) {
        if (rng.next_bool())
          s.contains_marker = true;
        else
          s.followed_by_marker = true;
      }
      talk.sentences.push_back(std::move(s));
    }
    talks.push_back(std::move(talk));
  }
  return talks;
}

inline std::string capitalize_word(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z')
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// transcript files whose laughter sentences carry the planted cue token
inline void write_transcripts(const std::string& dir, size_t n_talks, size_t positives,
                              uint64_t seed, bool with_markers) {
  std::filesystem::create_directories(dir);
  auto vocab = filler_vocab();
  humor::Rng rng(seed);
  for (size_t t = 0; t < n_talks; ++t) {
    std::string text;
    for (size_t p = 0; p < positives; ++p) {
      for (int kind = 0; kind < 2; ++kind) {
        std::vector<std::string> words;
        for (size_t w = 0; w < 8 + rng.next_below(3); ++w)
          words.push_back(vocab[rng.next_below(vocab.size())]);
        if (kind == 1) words[1 + rng.next_below(words.size() - 1)] = "zinger";
        std::string sentence;
        for (size_t w = 0; w < words.size(); ++w) {
          if (w) sentence += " ";
          sentence += words[w];
        }
        text += capitalize_word(sentence) + ".";
        if (kind == 1 && with_markers) text += " (Laughter)";
        text += " ";
      }
    }
    char name[64];
    std::snprintf(name, sizeof(name), "%s/talk%03zu.txt", dir.c_str(), t);
    std::ofstream out(name);
    out << text;
  }
}

inline std::string temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("humor_tests_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace fixtures
