#include "humor/features.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "humor/jobs.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary feature files are little-endian");

namespace humor {

using nlohmann::json;

TrainReference build_train_reference(const std::vector<LabeledInstance>& instances,
                                     const EmbeddingTable& embeddings) {
  TrainReference ref;
  ref.vectors.reserve(instances.size());
  ref.labels.reserve(instances.size());
  ref.ids.reserve(instances.size());
  for (const auto& inst : instances) {
    ref.vectors.push_back(avg_embedding(inst.tokens, embeddings));
    ref.labels.push_back(inst.label);
    ref.ids.push_back(id_of(inst));
  }
  return ref;
}

std::array<double, 2> incongruity_features(const std::vector<std::string>& tokens,
                                           const EmbeddingTable& embeddings) {
  std::vector<const std::vector<double>*> vecs;
  std::vector<double> norms;
  for (const auto& tok : tokens) {
    if (!embeddings.contains(tok)) continue;
    const auto& v = embeddings.lookup(tok);
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 == 0.0) continue;  // cosine undefined for zero vectors
    vecs.push_back(&v);
    norms.push_back(std::sqrt(n2));
  }
  if (vecs.size() < 2) return {0.0, 0.0};
  double max_dist = 0.0, min_dist = 2.0;
  for (size_t i = 0; i < vecs.size(); ++i) {
    for (size_t j = i + 1; j < vecs.size(); ++j) {
      double dot = 0.0;
      for (size_t c = 0; c < vecs[i]->size(); ++c) dot += (*vecs[i])[c] * (*vecs[j])[c];
      double dist = 1.0 - dot / (norms[i] * norms[j]);
      max_dist = std::max(max_dist, dist);
      min_dist = std::min(min_dist, dist);
    }
  }
  return {max_dist, min_dist};
}

std::array<double, 6> ambiguity_features(const std::vector<std::string>& tokens,
                                         const SenseInventory& senses) {
  double log_product = 0.0, max_count = 0.0, sum_count = 0.0;
  size_t n_counted = 0;
  for (const auto& tok : tokens) {
    if (!senses.has_count(tok)) continue;
    double c = static_cast<double>(senses.sense_count(tok));
    log_product += std::log(c);
    max_count = std::max(max_count, c);
    sum_count += c;
    ++n_counted;
  }
  double mean_count = n_counted == 0 ? 0.0 : sum_count / static_cast<double>(n_counted);
  if (n_counted == 0) log_product = 0.0;

  // similarity stats over pairs of distinct word types
  std::vector<std::string> types;
  std::unordered_set<std::string> seen;
  for (const auto& tok : tokens) {
    if (seen.insert(tok).second) types.push_back(tok);
  }
  double max_sim = 0.0, min_sim = 1.0, sum_sim = 0.0;
  size_t n_stored = 0;
  for (size_t i = 0; i < types.size(); ++i) {
    for (size_t j = i + 1; j < types.size(); ++j) {
      if (!senses.has_pair(types[i], types[j])) continue;
      double s = senses.pair_similarity(types[i], types[j]);
      max_sim = std::max(max_sim, s);
      min_sim = std::min(min_sim, s);
      sum_sim += s;
      ++n_stored;
    }
  }
  if (n_stored == 0) {
    max_sim = 0.0;
    min_sim = 0.0;
  }
  double mean_sim = n_stored == 0 ? 0.0 : sum_sim / static_cast<double>(n_stored);
  return {log_product, max_count, mean_count, max_sim, min_sim, mean_sim};
}

std::array<double, 4> interpersonal_features(const std::vector<std::string>& tokens,
                                             const SubjectivityLexicon& lexicon) {
  double pos = 0, neg = 0, weak = 0, strong = 0;
  for (const auto& tok : tokens) {
    const SubjectivityEntry* e = lexicon.lookup(tok);
    if (!e) continue;
    if (e->polarity == SubjectivityEntry::Polarity::Positive) pos += 1;
    if (e->polarity == SubjectivityEntry::Polarity::Negative) neg += 1;
    if (e->strength == SubjectivityEntry::Strength::Weak) weak += 1;
    if (e->strength == SubjectivityEntry::Strength::Strong) strong += 1;
  }
  return {pos, neg, weak, strong};
}

namespace {

std::string strip_stress(const std::string& phone) {
  size_t end = phone.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(phone[end - 1]))) --end;
  return phone.substr(0, end);
}

std::string first_phone_key(const std::vector<std::string>& phones) {
  return strip_stress(phones.front());
}

std::string final_pair_key(const std::vector<std::string>& phones) {
  if (phones.size() == 1) return strip_stress(phones[0]);
  return strip_stress(phones[phones.size() - 2]) + " " + strip_stress(phones.back());
}

// (number of maximal runs >= 2, length of the longest one)
std::pair<double, double> chain_stats(const std::vector<std::string>& keys) {
  double count = 0, max_len = 0;
  size_t i = 0;
  while (i < keys.size()) {
    size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    size_t len = j - i;
    if (len >= 2) {
      count += 1;
      max_len = std::max(max_len, static_cast<double>(len));
    }
    i = j;
  }
  return {count, max_len};
}

}  // namespace

std::array<double, 4> phonetic_features(const std::vector<std::string>& tokens,
                                        const PhoneticDictionary& phones) {
  std::vector<std::string> first_keys, final_keys;
  for (const auto& tok : tokens) {
    const auto& pron = phones.lookup(tok);
    if (pron.empty()) continue;
    first_keys.push_back(first_phone_key(pron));
    final_keys.push_back(final_pair_key(pron));
  }
  auto [allit_count, allit_len] = chain_stats(first_keys);
  auto [rhyme_count, rhyme_len] = chain_stats(final_keys);
  return {allit_count, allit_len, rhyme_count, rhyme_len};
}

std::array<double, 5> knn_label_features(const std::vector<double>& query,
                                         const TrainReference& reference, size_t k,
                                         const InstanceId* exclude) {
  struct Cand {
    double dist2;
    size_t ordinal;
  };
  std::vector<Cand> cands;
  cands.reserve(reference.size());
  for (size_t i = 0; i < reference.size(); ++i) {
    if (exclude && reference.ids[i] == *exclude) continue;
    const auto& v = reference.vectors[i];
    double d2 = 0.0;
    for (size_t c = 0; c < v.size(); ++c) {
      double diff = v[c] - query[c];
      d2 += diff * diff;
    }
    cands.push_back({d2, i});
  }
  auto by_dist = [](const Cand& a, const Cand& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.ordinal < b.ordinal);
  };
  size_t take = std::min(k, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + static_cast<ptrdiff_t>(take), cands.end(),
                    by_dist);
  std::array<double, 5> out{};
  for (size_t i = 0; i < take && i < 5; ++i)
    out[i] = reference.labels[cands[i].ordinal] == Label::Laughter ? 1.0 : 0.0;
  return out;
}

std::vector<double> avg_embedding(const std::vector<std::string>& tokens,
                                  const EmbeddingTable& embeddings) {
  std::vector<double> sum(embeddings.dim(), 0.0);
  size_t n = 0;
  for (const auto& tok : tokens) {
    if (!embeddings.contains(tok)) continue;
    const auto& v = embeddings.lookup(tok);
    for (size_t c = 0; c < sum.size(); ++c) sum[c] += v[c];
    ++n;
  }
  if (n > 0) {
    for (double& x : sum) x /= static_cast<double>(n);
  }
  return sum;
}

std::vector<double> extract_features(const LabeledInstance& instance, const Resources& res,
                                     const TrainReference& reference, size_t k) {
  auto inc = incongruity_features(instance.tokens, *res.embeddings);
  auto amb = ambiguity_features(instance.tokens, *res.senses);
  auto inter = interpersonal_features(instance.tokens, *res.subjectivity);
  auto phon = phonetic_features(instance.tokens, *res.phones);
  auto avg = avg_embedding(instance.tokens, *res.embeddings);
  InstanceId self = id_of(instance);
  auto knn = knn_label_features(avg, reference, k, &self);

  std::vector<double> out;
  out.reserve(feature_width(avg.size()));
  out.insert(out.end(), inc.begin(), inc.end());
  out.insert(out.end(), amb.begin(), amb.end());
  out.insert(out.end(), inter.begin(), inter.end());
  out.insert(out.end(), phon.begin(), phon.end());
  out.insert(out.end(), knn.begin(), knn.end());
  out.insert(out.end(), avg.begin(), avg.end());
  return out;
}

FeatureMatrix extract_matrix(const std::vector<LabeledInstance>& instances,
                             const Resources& res, const TrainReference& reference,
                             size_t k, unsigned jobs) {
  FeatureMatrix m;
  m.rows = instances.size();
  m.cols = feature_width(res.embeddings->dim());
  m.values.assign(m.rows * m.cols, 0.0);
  m.labels.resize(m.rows);
  parallel_for(m.rows, jobs, [&](size_t r) {
    auto row = extract_features(instances[r], res, reference, k);
    std::copy(row.begin(), row.end(), m.values.begin() + static_cast<ptrdiff_t>(r * m.cols));
    m.labels[r] = instances[r].label;
  });
  return m;
}

std::vector<std::string> feature_column_names(size_t embedding_dim) {
  std::vector<std::string> names;
  names.reserve(feature_width(embedding_dim));
  auto block = [&](const char* name, size_t width) {
    for (size_t i = 0; i < width; ++i) names.push_back(std::string(name) + "." + std::to_string(i));
  };
  block("incongruity", kIncongruityWidth);
  block("ambiguity", kAmbiguityWidth);
  block("interpersonal", kInterpersonalWidth);
  block("phonetic", kPhoneticWidth);
  block("knn", kKnnWidth);
  block("embedding", embedding_dim);
  return names;
}

void save_feature_csv(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  auto names = feature_column_names(m.cols - kStructuralWidth);
  for (size_t c = 0; c < names.size(); ++c) out << names[c] << ",";
  out << "label\n";
  char buf[32];
  for (size_t r = 0; r < m.rows; ++r) {
    for (size_t c = 0; c < m.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.at(r, c));
      out << buf << ",";
    }
    out << label_to_string(m.labels[r]) << "\n";
  }
}

FeatureMatrix load_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty feature file");
  size_t cols = static_cast<size_t>(std::count(header.begin(), header.end(), ','));
  if (cols < kStructuralWidth) throw DataError(path + ": malformed header");
  FeatureMatrix m;
  m.cols = cols;
  std::string line;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t start = 0;
    for (size_t c = 0; c < cols; ++c) {
      size_t comma = line.find(',', start);
      if (comma == std::string::npos)
        throw DataError(path + ":" + std::to_string(lineno) + ": too few columns");
      m.values.push_back(std::stod(line.substr(start, comma - start)));
      start = comma + 1;
    }
    m.labels.push_back(label_from_string(line.substr(start)));
    m.rows++;
  }
  return m;
}

void save_feature_binary(const FeatureMatrix& m, const std::string& data_path,
                         const std::string& sidecar_path) {
  std::ofstream out(data_path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + data_path);
  out.write(reinterpret_cast<const char*>(m.values.data()),
            static_cast<std::streamsize>(m.values.size() * sizeof(double)));
  json side;
  side["rows"] = m.rows;
  side["cols"] = m.cols;
  side["dtype"] = "float64";
  side["layout"] = "row-major";
  side["byte_order"] = "little-endian";
  std::vector<std::string> labels;
  labels.reserve(m.labels.size());
  for (Label l : m.labels) labels.push_back(label_to_string(l));
  side["labels"] = labels;
  std::ofstream sout(sidecar_path);
  if (!sout) throw DataError("cannot open for writing: " + sidecar_path);
  sout << side.dump(2) << "\n";
}

FeatureMatrix load_feature_binary(const std::string& data_path,
                                  const std::string& sidecar_path) {
  json side;
  {
    std::ifstream sin(sidecar_path);
    if (!sin) throw DataError("cannot open: " + sidecar_path);
    try {
      sin >> side;
    } catch (const json::exception& e) {
      throw DataError(sidecar_path + ": " + e.what());
    }
  }
  FeatureMatrix m;
  m.rows = side.at("rows").get<size_t>();
  m.cols = side.at("cols").get<size_t>();
  for (const auto& l : side.at("labels")) m.labels.push_back(label_from_string(l));
  if (m.labels.size() != m.rows) throw DataError(sidecar_path + ": labels/rows mismatch");
  m.values.resize(m.rows * m.cols);
  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + data_path);
  in.read(reinterpret_cast<char*>(m.values.data()),
          static_cast<std::streamsize>(m.values.size() * sizeof(double)));
  if (static_cast<size_t>(in.gcount()) != m.values.size() * sizeof(double))
    throw DataError(data_path + ": truncated data");
  return m;
}

}  // namespace humor
