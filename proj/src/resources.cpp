#include "humor/resources.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace humor {

namespace {

std::string lower_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool parse_double(const std::string& s, double* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end && std::isfinite(*out);
}

bool parse_int(const std::string& s, long* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(std::move(f));
  return fields;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string at_line(const std::string& path, size_t lineno) {
  return path + ":" + std::to_string(lineno);
}

}  // namespace

void EmbeddingTable::insert(const std::string& word, std::vector<double> vec) {
  if (vec.size() != dim_)
    throw DimensionMismatchError("vector for '" + word + "' has " +
                                 std::to_string(vec.size()) + " components, table dim is " +
                                 std::to_string(dim_));
  for (double v : vec) {
    if (!std::isfinite(v))
      throw DimensionMismatchError("non-finite component for '" + word + "'");
  }
  entries_[word] = std::move(vec);
}

EmbeddingTable load_embeddings(const std::string& path, size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  EmbeddingTable table(expected_dim);
  std::string line;
  size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_ws(line);
    if (first) {
      first = false;
      // optional "<count> <dim>" header
      long a = 0, b = 0;
      if (fields.size() == 2 && parse_int(fields[0], &a) && parse_int(fields[1], &b))
        continue;
    }
    if (fields.size() != expected_dim + 1)
      throw DimensionMismatchError(at_line(path, lineno) + ": expected " +
                                   std::to_string(expected_dim) + " components, got " +
                                   std::to_string(fields.size() - 1));
    std::vector<double> vec(expected_dim);
    for (size_t i = 0; i < expected_dim; ++i) {
      if (!parse_double(fields[i + 1], &vec[i]))
        throw DimensionMismatchError(at_line(path, lineno) + ": bad component '" +
                                     fields[i + 1] + "'");
    }
    table.insert(fields[0], std::move(vec));
  }
  if (table.size() == 0) throw EmptyTableError("no embedding entries in " + path);
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << table.size() << " " << table.dim() << "\n";
  char buf[32];
  for (const auto& [word, vec] : table.entries()) {
    out << word;
    for (double v : vec) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << " " << buf;
    }
    out << "\n";
  }
}

bool PhoneticDictionary::contains(const std::string& word) const {
  return entries_.count(lower_ascii(word)) > 0;
}

const std::vector<std::string>& PhoneticDictionary::lookup(const std::string& word) const {
  auto it = entries_.find(lower_ascii(word));
  return it == entries_.end() ? empty_ : it->second;
}

void PhoneticDictionary::insert(const std::string& word, std::vector<std::string> phones) {
  if (phones.empty()) throw MalformedLineError("empty phoneme list for '" + word + "'");
  entries_[lower_ascii(word)] = std::move(phones);
}

PhoneticDictionary load_phonetic_dict(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  PhoneticDictionary dict;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind(";;;", 0) == 0) continue;
    auto fields = split_ws(line);
    if (fields.size() < 2)
      throw MalformedLineError(at_line(path, lineno) + ": expected word and phonemes");
    const std::string& word = fields[0];
    // alternates like WORD(2) are skipped: one transcription per word
    if (word.find('(') != std::string::npos) continue;
    dict.insert(word, {fields.begin() + 1, fields.end()});
  }
  return dict;
}

bool SenseInventory::known(const std::string& word) const {
  return counts_.count(word) > 0 || words_in_pairs_.count(word) > 0;
}

std::string SenseInventory::pair_key(const std::string& a, const std::string& b) {
  return a <= b ? a + "\x1f" + b : b + "\x1f" + a;
}

int SenseInventory::sense_count(const std::string& word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

double SenseInventory::pair_similarity(const std::string& a, const std::string& b) const {
  if (a == b) return known(a) ? 1.0 : 0.0;
  auto it = sims_.find(pair_key(a, b));
  return it == sims_.end() ? 0.0 : it->second;
}

bool SenseInventory::has_pair(const std::string& a, const std::string& b) const {
  if (a == b) return known(a);
  return sims_.count(pair_key(a, b)) > 0;
}

void SenseInventory::set_count(const std::string& word, int count) {
  if (count < 1) throw MalformedLineError("sense count for '" + word + "' must be >= 1");
  counts_[word] = count;
}

void SenseInventory::set_similarity(const std::string& a, const std::string& b, double sim) {
  if (!(sim >= 0.0 && sim <= 1.0))
    throw SimilarityOutOfRangeError("similarity(" + a + "," + b + ") = " +
                                    std::to_string(sim) + " outside [0,1]");
  sims_[pair_key(a, b)] = sim;
  words_in_pairs_[a] = true;
  words_in_pairs_[b] = true;
}

const SubjectivityEntry* SubjectivityLexicon::lookup(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

SubjectivityLexicon load_subjectivity(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  SubjectivityLexicon lex;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 3)
      throw MalformedLineError(at_line(path, lineno) + ": expected word,polarity,strength");
    SubjectivityEntry entry;
    if (fields[1] == "positive")
      entry.polarity = SubjectivityEntry::Polarity::Positive;
    else if (fields[1] == "negative")
      entry.polarity = SubjectivityEntry::Polarity::Negative;
    else if (fields[1] == "neutral")
      entry.polarity = SubjectivityEntry::Polarity::Neutral;
    else
      throw MalformedLineError(at_line(path, lineno) + ": unknown polarity '" + fields[1] + "'");
    if (fields[2] == "weak")
      entry.strength = SubjectivityEntry::Strength::Weak;
    else if (fields[2] == "strong")
      entry.strength = SubjectivityEntry::Strength::Strong;
    else
      throw MalformedLineError(at_line(path, lineno) + ": unknown strength '" + fields[2] + "'");
    lex.insert(fields[0], entry);
  }
  return lex;
}

SenseInventory load_senses(const std::string& counts_path, const std::string& similarity_path) {
  SenseInventory inv;
  {
    std::ifstream in(counts_path);
    if (!in) throw DataError("cannot open: " + counts_path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto fields = split_csv(line);
      long count = 0;
      if (fields.size() != 2 || !parse_int(fields[1], &count))
        throw MalformedLineError(at_line(counts_path, lineno) + ": expected word,sense_count");
      if (count < 1)
        throw MalformedLineError(at_line(counts_path, lineno) + ": sense count must be >= 1");
      inv.set_count(fields[0], static_cast<int>(count));
    }
  }
  {
    std::ifstream in(similarity_path);
    if (!in) throw DataError("cannot open: " + similarity_path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto fields = split_csv(line);
      double sim = 0.0;
      if (fields.size() != 3 || !parse_double(fields[2], &sim))
        throw MalformedLineError(at_line(similarity_path, lineno) +
                                 ": expected word1,word2,similarity");
      if (!(sim >= 0.0 && sim <= 1.0))
        throw SimilarityOutOfRangeError(at_line(similarity_path, lineno) + ": similarity " +
                                        fields[2] + " outside [0,1]");
      inv.set_similarity(fields[0], fields[1], sim);
    }
  }
  return inv;
}

}  // namespace humor
