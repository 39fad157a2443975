#include "doctest.h"
#include "humor/corpus.hpp"

#include <filesystem>
#include <map>
#include <set>

#include "helpers.hpp"
#include "humor/rng.hpp"

using namespace humor;

namespace {

const char* kExcerpt =
    "He has no memory of the past, no knowledge of the future, and he only cares "
    "about two things: easy and fun. Now, in the animal world, that works fine. "
    "If you're a dog and you spend your whole life doing nothing other than easy "
    "and fun things, you're a huge success! (Laughter) And to the Monkey, humans "
    "are just another animal species.";

Talk make_talk(const std::string& id, const std::vector<std::pair<std::string, bool>>& rows) {
  Talk talk;
  talk.talk_id = id;
  for (size_t i = 0; i < rows.size(); ++i) {
    RawSentence s;
    s.index = i;
    s.text = rows[i].first;
    s.contains_marker = rows[i].second;
    talk.sentences.push_back(std::move(s));
  }
  return talk;
}

}  // namespace

TEST_CASE("transcript excerpt parses with the laughter flag on the right sentence") {
  Talk talk = parse_transcript("talk1", kExcerpt);
  REQUIRE(talk.sentences.size() == 4);
  for (size_t i = 0; i < talk.sentences.size(); ++i)
    CHECK(talk.sentences[i].index == i);
  CHECK_FALSE(talk.sentences[0].laughter());
  CHECK_FALSE(talk.sentences[1].laughter());
  CHECK(talk.sentences[2].followed_by_marker);
  CHECK(talk.sentences[2].text.find("huge success!") != std::string::npos);
  CHECK_FALSE(talk.sentences[3].laughter());
}

TEST_CASE("sampling the excerpt pairs the positive with a window neighbour") {
  Talk talk = parse_transcript("talk1", kExcerpt);
  BuildReport report;
  Corpus corpus = sample_balanced({talk}, 7, 1, &report);
  REQUIRE(corpus.instances.size() == 2);
  CHECK(report.pairs_made == 1);
  CHECK(report.dropped_positives == 0);
  const auto& neg = corpus.instances[0];  // sorted by sent_idx: negative is idx 1
  const auto& pos = corpus.instances[1];
  CHECK(pos.label == Label::Laughter);
  CHECK(pos.sent_idx == 2);
  CHECK(neg.label == Label::NoLaughter);
  CHECK(neg.sent_idx == 1);  // nearest preceding neighbour
  REQUIRE(neg.pair_idx.has_value());
  CHECK(*neg.pair_idx == 2);
}

TEST_CASE("single forced candidate") {
  Talk talk = make_talk("t", {{"plain words here", false}, {"funny words here", true}});
  Corpus corpus = sample_balanced({talk}, 7, 0);
  REQUIRE(corpus.instances.size() == 2);
  CHECK(corpus.instances[0].label == Label::NoLaughter);
  CHECK(corpus.instances[1].label == Label::Laughter);
}

TEST_CASE("adjacent positives with one shared neighbour drop one positive") {
  Talk talk = make_talk(
      "t", {{"first funny", true}, {"second funny", true}, {"plain filler", false}});
  BuildReport report;
  Corpus corpus = sample_balanced({talk}, 7, 0, &report);
  // positive 0 grabs sentence 2 (distance 2); positive 1 finds nothing left
  REQUIRE(corpus.instances.size() == 2);
  CHECK(report.positives_found == 2);
  CHECK(report.pairs_made == 1);
  CHECK(report.dropped_positives == 1);
  CHECK(corpus.instances[0].sent_idx == 0);
  CHECK(corpus.instances[0].label == Label::Laughter);
  CHECK(corpus.instances[1].sent_idx == 2);
  REQUIRE(corpus.instances[1].pair_idx.has_value());
  CHECK(*corpus.instances[1].pair_idx == 0);
}

TEST_CASE("candidate order prefers nearest then preceding") {
  Talk talk = make_talk("t", {{"far before", false},
                              {"near before", false},
                              {"the funny one", true},
                              {"near after", false}});
  Corpus corpus = sample_balanced({talk}, 7, 0);
  REQUIRE(corpus.instances.size() == 2);
  CHECK(corpus.instances[0].sent_idx == 1);  // distance 1, preceding beats following
  CHECK(corpus.instances[0].label == Label::NoLaughter);
}

TEST_CASE("empty-token sentences are excluded from sampling entirely") {
  Talk talk = make_talk("t", {{"?!", false}, {"the funny one", true}, {"plain one", false}});
  Corpus corpus = sample_balanced({talk}, 7, 0);
  REQUIRE(corpus.instances.size() == 2);
  CHECK(corpus.instances[0].sent_idx == 1);
  CHECK(corpus.instances[1].sent_idx == 2);  // "?!" was skipped
  Talk flagged_empty = make_talk("u", {{"?!", true}, {"plain one", false}});
  CHECK_THROWS_AS(sample_balanced({flagged_empty}, 7, 0), EmptyCorpusError);
}

TEST_CASE("no positives or no eligible negatives raise EmptyCorpus") {
  Talk no_pos = make_talk("t", {{"one", false}, {"two", false}});
  CHECK_THROWS_AS(sample_balanced({no_pos}, 7, 0), EmptyCorpusError);
  Talk lonely = make_talk("u", {{"the funny one", true}});
  CHECK_THROWS_AS(sample_balanced({lonely}, 7, 0), EmptyCorpusError);
}

TEST_CASE("sampling is deterministic") {
  Rng rng(3);
  auto talks = fixtures::random_talks(rng, 30);
  auto dir = fixtures::temp_dir("corpus_det");
  Corpus a = sample_balanced(talks, 7, 42);
  Corpus b = sample_balanced(talks, 7, 42);
  save_corpus_jsonl(a, dir + "/a.jsonl");
  save_corpus_jsonl(b, dir + "/b.jsonl");
  CHECK(fixtures::read_file(dir + "/a.jsonl") == fixtures::read_file(dir + "/b.jsonl"));
}

TEST_CASE("dev/cv split groups whole talks") {
  auto talks = fixtures::separable_talks(10, 5, 1);  // equal-sized talks
  Corpus corpus = sample_balanced(talks, 7, 0);
  auto [dev, cv] = split_dev_cv(corpus, 0.2, true, 9);
  std::set<std::string> dev_talks, cv_talks;
  for (const auto& i : dev.instances) dev_talks.insert(i.talk_id);
  for (const auto& i : cv.instances) cv_talks.insert(i.talk_id);
  CHECK(dev_talks.size() == 2);
  CHECK(cv_talks.size() == 8);
  for (const auto& id : dev_talks) CHECK(cv_talks.count(id) == 0);
  CHECK(dev.instances.size() + cv.instances.size() == corpus.instances.size());
}

TEST_CASE("ungrouped split approximates the fraction") {
  auto talks = fixtures::separable_talks(5, 10, 2);
  Corpus corpus = sample_balanced(talks, 7, 0);
  auto [dev, cv] = split_dev_cv(corpus, 0.25, false, 4);
  CHECK(dev.instances.size() ==
        static_cast<size_t>(std::llround(0.25 * static_cast<double>(corpus.instances.size()))));
}

TEST_CASE("degenerate splits throw") {
  auto talks = fixtures::separable_talks(1, 3, 3);
  Corpus corpus = sample_balanced(talks, 7, 0);
  CHECK_THROWS_AS(split_dev_cv(corpus, 0.5, true, 0), DegenerateSplitError);
  CHECK_THROWS_AS(split_dev_cv(corpus, 1.5, true, 0), std::invalid_argument);
}

TEST_CASE("grouped folds deal talks round-robin") {
  auto talks = fixtures::separable_talks(20, 4, 5);
  Corpus corpus = sample_balanced(talks, 7, 0);
  FoldPlan plan = make_folds(corpus, 10, true, 11);
  REQUIRE(plan.folds.size() == 10);
  std::set<size_t> seen;
  for (const auto& fold : plan.folds) {
    std::set<std::string> talks_in_fold;
    for (size_t ordinal : fold) {
      CHECK(seen.insert(ordinal).second);
      talks_in_fold.insert(corpus.instances[ordinal].talk_id);
    }
    CHECK(talks_in_fold.size() == 2);  // 20 talks over 10 folds
  }
  CHECK(seen.size() == corpus.instances.size());
}

TEST_CASE("two talks over two folds is one talk each") {
  auto talks = fixtures::separable_talks(2, 3, 6);
  Corpus corpus = sample_balanced(talks, 7, 0);
  FoldPlan plan = make_folds(corpus, 2, true, 1);
  for (const auto& fold : plan.folds) {
    std::set<std::string> ids;
    for (size_t ordinal : fold) ids.insert(corpus.instances[ordinal].talk_id);
    CHECK(ids.size() == 1);
  }
}

TEST_CASE("too few groups throws") {
  auto talks = fixtures::separable_talks(3, 3, 7);
  Corpus corpus = sample_balanced(talks, 7, 0);
  CHECK_THROWS_AS(make_folds(corpus, 10, true, 0), TooFewGroupsError);
  CHECK_THROWS_AS(make_folds(corpus, 1, true, 0), std::invalid_argument);
}

TEST_CASE("corpus jsonl round-trips and ends with a newline") {
  auto talks = fixtures::separable_talks(3, 4, 8);
  Corpus corpus = sample_balanced(talks, 7, 17);
  auto dir = fixtures::temp_dir("corpus_io");
  save_corpus_jsonl(corpus, dir + "/c.jsonl");
  std::string raw = fixtures::read_file(dir + "/c.jsonl");
  REQUIRE(!raw.empty());
  CHECK(raw.back() == '\n');
  Corpus loaded = load_corpus_jsonl(dir + "/c.jsonl");
  REQUIRE(loaded.instances.size() == corpus.instances.size());
  for (size_t i = 0; i < corpus.instances.size(); ++i) {
    CHECK(loaded.instances[i].talk_id == corpus.instances[i].talk_id);
    CHECK(loaded.instances[i].sent_idx == corpus.instances[i].sent_idx);
    CHECK(loaded.instances[i].tokens == corpus.instances[i].tokens);
    CHECK(loaded.instances[i].text == corpus.instances[i].text);
    CHECK(loaded.instances[i].label == corpus.instances[i].label);
    CHECK(loaded.instances[i].pair_idx == corpus.instances[i].pair_idx);
    if (loaded.instances[i].label == Label::Laughter)
      CHECK_FALSE(loaded.instances[i].pair_idx.has_value());
  }
}

TEST_CASE("fold plan round-trips") {
  auto talks = fixtures::separable_talks(12, 3, 9);
  Corpus corpus = sample_balanced(talks, 7, 0);
  FoldPlan plan = make_folds(corpus, 4, true, 21);
  auto dir = fixtures::temp_dir("plan_io");
  save_fold_plan(plan, dir + "/plan.json");
  FoldPlan loaded = load_fold_plan(dir + "/plan.json");
  CHECK(loaded.k == plan.k);
  CHECK(loaded.seed == plan.seed);
  CHECK(loaded.folds == plan.folds);
}

// the randomized invariant suite; the acceptance run repeats this at >= 1000 talks
TEST_CASE("corpus invariants hold on randomized talks") {
  Rng rng(2024);
  size_t talks_checked = 0;
  for (int batch = 0; batch < 25; ++batch) {
    auto talks = fixtures::random_talks(rng, 12, static_cast<size_t>(batch) * 12);
    talks_checked += talks.size();
    Corpus corpus;
    try {
      corpus = sample_balanced(talks, 7, static_cast<uint64_t>(batch));
    } catch (const EmptyCorpusError&) {
      continue;
    }
    std::map<std::string, const Talk*> by_id;
    for (const auto& t : talks) by_id[t.talk_id] = &t;

    size_t positives = 0, negatives = 0;
    std::set<std::pair<std::string, size_t>> ids;
    std::map<std::pair<std::string, size_t>, const LabeledInstance*> pos_index;
    for (const auto& inst : corpus.instances) {
      CHECK(ids.insert({inst.talk_id, inst.sent_idx}).second);
      CHECK_FALSE(inst.tokens.empty());
      const Talk* talk = by_id[inst.talk_id];
      REQUIRE(talk != nullptr);
      const RawSentence& src = talk->sentences[inst.sent_idx];
      if (inst.label == Label::Laughter) {
        positives++;
        CHECK(src.laughter());
        pos_index[{inst.talk_id, inst.sent_idx}] = &inst;
      } else {
        negatives++;
        CHECK_FALSE(src.laughter());
        REQUIRE(inst.pair_idx.has_value());
        size_t delta = inst.sent_idx > *inst.pair_idx ? inst.sent_idx - *inst.pair_idx
                                                      : *inst.pair_idx - inst.sent_idx;
        CHECK(delta <= 7);
      }
    }
    CHECK(positives == negatives);
    for (const auto& inst : corpus.instances) {
      if (inst.label == Label::NoLaughter)
        CHECK(pos_index.count({inst.talk_id, *inst.pair_idx}) == 1);
    }
  }
  CHECK(talks_checked >= 300);
}
