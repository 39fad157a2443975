#include "humor/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "humor/rng.hpp"
#include "json.hpp"

namespace humor {

using nlohmann::json;

std::string label_to_string(Label l) {
  return l == Label::Laughter ? "laughter" : "no_laughter";
}

Label label_from_string(const std::string& s) {
  if (s == "laughter") return Label::Laughter;
  if (s == "no_laughter") return Label::NoLaughter;
  throw DataError("unknown label: " + s);
}

Talk parse_transcript(const std::string& talk_id, const std::string& text) {
  Talk talk;
  talk.talk_id = talk_id;
  auto spans = segment_transcript(text);
  talk.sentences.reserve(spans.size());
  for (size_t i = 0; i < spans.size(); ++i) {
    RawSentence s;
    s.index = i;
    s.text = std::move(spans[i].text);
    s.contains_marker = spans[i].contains_marker;
    s.followed_by_marker = spans[i].followed_by_marker;
    talk.sentences.push_back(std::move(s));
  }
  return talk;
}

namespace {

struct TalkView {
  const Talk* talk;
  std::vector<std::vector<std::string>> tokens;
  std::vector<bool> laughter;
};

void append_instance(std::vector<LabeledInstance>& out, const Talk& talk, size_t idx,
                     std::vector<std::string> tokens, Label label,
                     std::optional<size_t> pair) {
  LabeledInstance inst;
  inst.talk_id = talk.talk_id;
  inst.sent_idx = idx;
  inst.tokens = std::move(tokens);
  inst.text = talk.sentences[idx].text;
  inst.label = label;
  inst.pair_idx = pair;
  out.push_back(std::move(inst));
}

}  // namespace

Corpus sample_balanced(const std::vector<Talk>& talks, size_t window, uint64_t seed,
                       BuildReport* report) {
  std::vector<const Talk*> ordered;
  ordered.reserve(talks.size());
  std::unordered_set<std::string> seen_ids;
  for (const Talk& t : talks) {
    if (t.talk_id.empty()) throw DataError("talk with empty talk_id");
    if (!seen_ids.insert(t.talk_id).second)
      throw DataError("duplicate talk_id: " + t.talk_id);
    ordered.push_back(&t);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Talk* a, const Talk* b) { return a->talk_id < b->talk_id; });

  BuildReport rep;
  rep.window = window;
  rep.seed = seed;
  rep.talks = talks.size();

  Corpus corpus;
  corpus.window = window;
  corpus.seed = seed;

  for (const Talk* talk : ordered) {
    const size_t n = talk->sentences.size();
    rep.sentences += n;
    std::vector<std::vector<std::string>> tokens(n);
    std::vector<bool> used(n, false);
    for (size_t i = 0; i < n; ++i) tokens[i] = tokenize(talk->sentences[i].text);

    std::vector<LabeledInstance> picked;
    for (size_t p = 0; p < n; ++p) {
      if (!talk->sentences[p].laughter()) continue;
      if (tokens[p].empty()) continue;
      rep.positives_found++;

      // nearest first, preceding before following at equal distance
      std::optional<size_t> chosen;
      for (size_t d = 1; d <= window && !chosen; ++d) {
        if (p >= d) {
          size_t c = p - d;
          if (!talk->sentences[c].laughter() && !tokens[c].empty() && !used[c]) chosen = c;
        }
        if (!chosen && p + d < n) {
          size_t c = p + d;
          if (!talk->sentences[c].laughter() && !tokens[c].empty() && !used[c]) chosen = c;
        }
      }
      if (!chosen) {
        rep.dropped_positives++;
        continue;
      }
      used[*chosen] = true;
      rep.pairs_made++;
      append_instance(picked, *talk, p, tokens[p], Label::Laughter, std::nullopt);
      append_instance(picked, *talk, *chosen, tokens[*chosen], Label::NoLaughter, p);
    }
    std::sort(picked.begin(), picked.end(),
              [](const LabeledInstance& a, const LabeledInstance& b) {
                return a.sent_idx < b.sent_idx;
              });
    for (auto& inst : picked) corpus.instances.push_back(std::move(inst));
  }

  if (report) *report = rep;
  if (rep.pairs_made == 0)
    throw EmptyCorpusError("no positive instance has an eligible negative");
  return corpus;
}

namespace {

// talk ids in corpus order (corpus is sorted, so this is sorted + unique)
std::vector<std::string> talk_ids_of(const Corpus& corpus) {
  std::vector<std::string> ids;
  for (const auto& inst : corpus.instances) {
    if (ids.empty() || ids.back() != inst.talk_id) ids.push_back(inst.talk_id);
  }
  return ids;
}

Corpus select_instances(const Corpus& corpus, const std::vector<bool>& keep) {
  Corpus out;
  out.window = corpus.window;
  out.seed = corpus.seed;
  for (size_t i = 0; i < corpus.instances.size(); ++i) {
    if (keep[i]) out.instances.push_back(corpus.instances[i]);
  }
  return out;
}

}  // namespace

std::pair<Corpus, Corpus> split_dev_cv(const Corpus& corpus, double dev_fraction,
                                       bool group_by_talk, uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
    throw std::invalid_argument("dev_fraction must be in (0, 1)");
  const size_t n = corpus.instances.size();
  if (n < 2) throw DegenerateSplitError("corpus too small to split");

  Rng rng(seed);
  std::vector<bool> in_dev(n, false);
  if (group_by_talk) {
    std::unordered_map<std::string, size_t> talk_size;
    for (const auto& inst : corpus.instances) talk_size[inst.talk_id]++;
    auto ids = talk_ids_of(corpus);
    rng.shuffle(ids);
    const double target = dev_fraction * static_cast<double>(n);
    std::unordered_set<std::string> dev_talks;
    size_t dev_count = 0;
    for (const auto& id : ids) {
      if (static_cast<double>(dev_count) >= target) break;
      dev_talks.insert(id);
      dev_count += talk_size[id];
    }
    for (size_t i = 0; i < n; ++i) in_dev[i] = dev_talks.count(corpus.instances[i].talk_id) > 0;
  } else {
    std::vector<size_t> ordinals(n);
    for (size_t i = 0; i < n; ++i) ordinals[i] = i;
    rng.shuffle(ordinals);
    size_t n_dev = static_cast<size_t>(std::llround(dev_fraction * static_cast<double>(n)));
    for (size_t i = 0; i < n_dev && i < n; ++i) in_dev[ordinals[i]] = true;
  }

  Corpus dev = select_instances(corpus, in_dev);
  for (size_t i = 0; i < n; ++i) in_dev[i] = !in_dev[i];
  Corpus cv = select_instances(corpus, in_dev);
  if (dev.instances.empty() || cv.instances.empty())
    throw DegenerateSplitError("dev/cv split would leave one side empty");
  return {std::move(dev), std::move(cv)};
}

FoldPlan make_folds(const Corpus& cv, size_t k, bool group_by_talk, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(k, {});

  Rng rng(seed);
  if (group_by_talk) {
    auto ids = talk_ids_of(cv);
    if (ids.size() < k)
      throw TooFewGroupsError("need at least " + std::to_string(k) + " talks, have " +
                              std::to_string(ids.size()));
    rng.shuffle(ids);
    std::unordered_map<std::string, size_t> fold_of;
    for (size_t i = 0; i < ids.size(); ++i) fold_of[ids[i]] = i % k;
    for (size_t i = 0; i < cv.instances.size(); ++i)
      plan.folds[fold_of[cv.instances[i].talk_id]].push_back(i);
  } else {
    const size_t n = cv.instances.size();
    if (n < k)
      throw TooFewGroupsError("need at least " + std::to_string(k) + " instances, have " +
                              std::to_string(n));
    std::vector<size_t> ordinals(n);
    for (size_t i = 0; i < n; ++i) ordinals[i] = i;
    rng.shuffle(ordinals);
    for (size_t i = 0; i < n; ++i) plan.folds[i % k].push_back(ordinals[i]);
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  }
  return plan;
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& inst : corpus.instances) {
    json j;
    j["talk_id"] = inst.talk_id;
    j["sent_idx"] = inst.sent_idx;
    j["text"] = inst.text;
    j["tokens"] = inst.tokens;
    j["label"] = label_to_string(inst.label);
    if (inst.pair_idx) j["pair_idx"] = *inst.pair_idx;
    out << j.dump() << "\n";
  }
}

Corpus load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  Corpus corpus;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
    }
    LabeledInstance inst;
    try {
      inst.talk_id = j.at("talk_id").get<std::string>();
      inst.sent_idx = j.at("sent_idx").get<size_t>();
      inst.text = j.at("text").get<std::string>();
      inst.tokens = j.at("tokens").get<std::vector<std::string>>();
      inst.label = label_from_string(j.at("label").get<std::string>());
      if (j.contains("pair_idx")) inst.pair_idx = j.at("pair_idx").get<size_t>();
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

void save_fold_plan(const FoldPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  json j;
  j["k"] = plan.k;
  j["seed"] = plan.seed;
  j["folds"] = plan.folds;
  out << j.dump(2) << "\n";
}

FoldPlan load_fold_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  json j;
  try {
    in >> j;
    FoldPlan plan;
    plan.k = j.at("k").get<size_t>();
    plan.seed = j.at("seed").get<uint64_t>();
    plan.folds = j.at("folds").get<std::vector<std::vector<size_t>>>();
    return plan;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_build_report(const BuildReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  json j;
  j["talks"] = report.talks;
  j["sentences"] = report.sentences;
  j["positives_found"] = report.positives_found;
  j["pairs_made"] = report.pairs_made;
  j["dropped_positives"] = report.dropped_positives;
  j["window"] = report.window;
  j["seed"] = report.seed;
  out << j.dump(2) << "\n";
}

}  // namespace humor
