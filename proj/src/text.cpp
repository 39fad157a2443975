#include "humor/text.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace humor {

namespace {

const char* kLaughterMarker = "(Laughter)";
const char* kApplauseMarker = "(Applause)";

// Frozen stop-list: a '.' ending one of these never closes a sentence.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> kAbbreviations = {
      "Mr.",  "Mrs.", "Ms.",  "Dr.",  "Prof.", "Sr.",   "Jr.",  "St.",
      "Mt.",  "Gen.", "Rep.", "Sen.", "Gov.",  "Capt.", "Sgt.", "U.S.",
      "U.K.", "U.N.", "D.C.", "B.C.", "A.D.",  "a.m.",  "p.m.", "e.g.",
      "i.e.", "etc.", "vs.",  "cf.",  "No.",   "Vol.",  "Fig.", "approx."};
  return kAbbreviations;
}

bool is_space_byte(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool starts_with(const std::string& s, size_t i, const char* lit) {
  for (size_t k = 0; lit[k] != '\0'; ++k) {
    if (i + k >= s.size() || s[i + k] != lit[k]) return false;
  }
  return true;
}

// matches " ' and the UTF-8 curly quotes; *len receives the byte length
bool match_quote(const std::string& s, size_t i, size_t* len) {
  if (i >= s.size()) return false;
  if (s[i] == '"' || s[i] == '\'') {
    *len = 1;
    return true;
  }
  static const std::array<const char*, 4> curly = {"\xE2\x80\x9C", "\xE2\x80\x9D",
                                                   "\xE2\x80\x98", "\xE2\x80\x99"};
  for (const char* q : curly) {
    if (starts_with(s, i, q)) {
      *len = 3;
      return true;
    }
  }
  return false;
}

int marker_length(const std::string& s, size_t i, bool* is_laughter) {
  if (starts_with(s, i, kLaughterMarker)) {
    *is_laughter = true;
    return static_cast<int>(std::string(kLaughterMarker).size());
  }
  if (starts_with(s, i, kApplauseMarker)) {
    *is_laughter = false;
    return static_cast<int>(std::string(kApplauseMarker).size());
  }
  return 0;
}

// the whitespace-delimited word cur ends with (cur ends in '.')
std::string trailing_word(const std::string& cur) {
  size_t start = cur.find_last_of(" \t");
  return start == std::string::npos ? cur : cur.substr(start + 1);
}

bool is_abbreviation(const std::string& word) {
  if (abbreviations().count(word)) return true;
  // single initial, e.g. "J." in "J. Smith"
  return word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0])) &&
         word[1] == '.';
}

struct Segmenter {
  const std::string& input;
  std::vector<SentenceSpan> out;
  std::string cur;
  bool cur_contains = false;

  explicit Segmenter(const std::string& text) : input(text) {}

  bool cur_has_content() const {
    for (char c : cur) {
      if (!is_space_byte(c)) return true;
    }
    return false;
  }

  void append(char c) {
    if (is_space_byte(c)) {
      if (!cur.empty() && cur.back() != ' ') cur += ' ';
    } else {
      cur += c;
    }
  }

  void flush() {
    while (!cur.empty() && cur.back() == ' ') cur.pop_back();
    if (!cur.empty()) {
      SentenceSpan span;
      span.text = cur;
      span.contains_marker = cur_contains;
      out.push_back(std::move(span));
    }
    cur.clear();
    cur_contains = false;
  }

  void on_marker(bool is_laughter) {
    if (cur_has_content()) {
      if (is_laughter) cur_contains = true;
    } else if (is_laughter && !out.empty()) {
      out.back().followed_by_marker = true;
    }
    // a marker before any sentence is dropped
  }

  // true when, skipping spaces from i, the content can start a new sentence
  bool boundary_follows(size_t i) const {
    while (i < input.size() && is_space_byte(input[i])) ++i;
    if (i >= input.size()) return true;
    unsigned char c = static_cast<unsigned char>(input[i]);
    if (std::isupper(c)) return true;
    size_t qlen = 0;
    if (match_quote(input, i, &qlen)) return true;
    bool laugh = false;
    return marker_length(input, i, &laugh) > 0;
  }

  bool marker_follows(size_t i) const {
    while (i < input.size() && is_space_byte(input[i])) ++i;
    bool laugh = false;
    return marker_length(input, i, &laugh) > 0;
  }

  std::vector<SentenceSpan> run() {
    size_t i = 0;
    const size_t n = input.size();
    while (i < n) {
      char c = input[i];

      bool is_laughter = false;
      if (int mlen = marker_length(input, i, &is_laughter); mlen > 0) {
        on_marker(is_laughter);
        i += static_cast<size_t>(mlen);
        continue;
      }

      if (c == '\n') {
        // paragraph break: a second newline with only blanks between
        size_t j = i + 1;
        while (j < n && (input[j] == ' ' || input[j] == '\t' || input[j] == '\r')) ++j;
        if (j < n && input[j] == '\n') {
          flush();
          i = j + 1;
          continue;
        }
        append(c);
        ++i;
        continue;
      }

      if (is_terminator(c)) {
        size_t run_start = i;
        while (i < n && is_terminator(input[i])) {
          cur += input[i];
          ++i;
        }
        // a stage marker right after the terminator always closes the
        // sentence, even after an abbreviation or initial
        bool single_dot = (i - run_start == 1) && input[run_start] == '.';
        if (single_dot && !marker_follows(i) && is_abbreviation(trailing_word(cur)))
          continue;
        // absorb a closing quote glued to the terminator
        size_t qlen = 0;
        if (match_quote(input, i, &qlen)) {
          cur.append(input, i, qlen);
          i += qlen;
        }
        if (i >= n || (is_space_byte(input[i]) && boundary_follows(i))) flush();
        continue;
      }

      append(c);
      ++i;
    }
    flush();
    return std::move(out);
  }
};

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

std::vector<SentenceSpan> segment_transcript(const std::string& text) {
  return Segmenter(text).run();
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  for (auto& span : segment_transcript(text)) sentences.push_back(std::move(span.text));
  return sentences;
}

std::vector<std::string> tokenize(const std::string& sentence) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&]() {
    if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  };
  const size_t n = sentence.size();
  size_t i = 0;
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(sentence[i]);
    size_t qlen = 0;
    bool apostrophe = false;
    size_t step = 1;
    if (c == '\'') {
      apostrophe = true;
    } else if (starts_with(sentence, i, "\xE2\x80\x99")) {  // curly apostrophe
      apostrophe = true;
      step = 3;
    }
    if (apostrophe) {
      // keep only word-internal apostrophes, normalized to ASCII
      size_t next = i + step;
      if (!cur.empty() && next < n && is_word_byte(static_cast<unsigned char>(sentence[next]))) {
        cur += '\'';
      } else {
        flush();
      }
      i = next;
      continue;
    }
    if (match_quote(sentence, i, &qlen)) {  // remaining curly quotes are punctuation
      flush();
      i += qlen;
      continue;
    }
    if (is_word_byte(c)) {
      cur += static_cast<char>(std::tolower(c));
      ++i;
      continue;
    }
    if (c >= 0x80) {  // keep non-ASCII letters whole
      cur += static_cast<char>(c);
      ++i;
      continue;
    }
    flush();
    ++i;
  }
  flush();
  return tokens;
}

}  // namespace humor
