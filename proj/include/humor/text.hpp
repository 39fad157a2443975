#pragma once

#include <string>
#include <vector>

namespace humor {

// One segmented sentence plus where laughter markup sat relative to it.
struct SentenceSpan {
  std::string text;                 // marker-free, whitespace-collapsed
  bool contains_marker = false;     // "(Laughter)" appeared inside the sentence
  bool followed_by_marker = false;  // "(Laughter)" was the next standalone content
};

// Rule-based sentence segmentation. Splits after a run of {. ! ?} when the
// next non-space content is a capital letter, an opening quote, or a stage
// marker; a paragraph break always splits. A '.' directly after a known
// abbreviation (see kAbbreviations in text.cpp) or a single initial never
// splits. "(Laughter)" and "(Applause)" are stripped from the text; a marker
// standing alone between sentences attaches to the preceding one.
std::vector<SentenceSpan> segment_transcript(const std::string& text);

// segment_transcript with the marker bookkeeping dropped.
std::vector<std::string> split_sentences(const std::string& text);

// Lowercases and splits on whitespace/punctuation; punctuation tokens are
// dropped and word-internal apostrophes are kept ("you're" stays whole).
std::vector<std::string> tokenize(const std::string& sentence);

}  // namespace humor
