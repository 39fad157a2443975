#include "doctest.h"
#include "humor/resources.hpp"

#include "helpers.hpp"
#include "humor/rng.hpp"

using namespace humor;

TEST_CASE("embedding table parses a small fixture") {
  auto dir = fixtures::temp_dir("emb1");
  fixtures::write_file(dir + "/vecs.txt",
                       "cat 1.0 0.0\n"
                       "dog 0.0 1.0\n"
                       "dog 0.5 0.5\n"  // duplicate: last wins
                       "eel -1.0 2.0\n");
  auto table = load_embeddings(dir + "/vecs.txt", 2);
  CHECK(table.size() == 3);
  CHECK(table.dim() == 2);
  CHECK(table.lookup("dog") == std::vector<double>{0.5, 0.5});
  CHECK(table.lookup("zzz-unseen") == std::vector<double>{0.0, 0.0});
  CHECK_FALSE(table.contains("zzz-unseen"));
}

TEST_CASE("embedding header line is accepted") {
  auto dir = fixtures::temp_dir("emb2");
  fixtures::write_file(dir + "/vecs.txt", "2 2\na 1 0\nb 0 1\n");
  auto table = load_embeddings(dir + "/vecs.txt", 2);
  CHECK(table.size() == 2);
}

TEST_CASE("embedding arity errors carry the line number") {
  auto dir = fixtures::temp_dir("emb3");
  fixtures::write_file(dir + "/vecs.txt", "dog 1.0 2.0\ncat 1.0\n");
  try {
    load_embeddings(dir + "/vecs.txt", 2);
    FAIL("expected DimensionMismatchError");
  } catch (const DimensionMismatchError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  fixtures::write_file(dir + "/bad.txt", "dog 1.0 oops\n");
  CHECK_THROWS_AS(load_embeddings(dir + "/bad.txt", 2), DimensionMismatchError);
  fixtures::write_file(dir + "/empty.txt", "");
  CHECK_THROWS_AS(load_embeddings(dir + "/empty.txt", 2), EmptyTableError);
}

TEST_CASE("embedding write/reload reproduces every entry exactly") {
  auto dir = fixtures::temp_dir("emb4");
  EmbeddingTable table(5);
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    std::vector<double> v(5);
    for (double& x : v) x = rng.next_uniform(-3.0, 3.0);
    table.insert("word" + std::to_string(i), v);
  }
  save_embeddings(table, dir + "/out.txt");
  auto loaded = load_embeddings(dir + "/out.txt", 5);
  REQUIRE(loaded.size() == table.size());
  for (const auto& [word, vec] : table.entries()) {
    REQUIRE(loaded.contains(word));
    CHECK(loaded.lookup(word) == vec);  // bitwise equality
  }
}

TEST_CASE("phonetic dictionary parsing") {
  auto dir = fixtures::temp_dir("phones");
  fixtures::write_file(dir + "/dict.txt",
                       ";;; a comment line\n"
                       "PETER  P IY1 T ER0\n"
                       "PIPER(2)  P AY1 P ER0\n");
  auto dict = load_phonetic_dict(dir + "/dict.txt");
  CHECK(dict.size() == 1);
  CHECK(dict.lookup("peter") == std::vector<std::string>{"P", "IY1", "T", "ER0"});
  CHECK(dict.lookup("PeTeR") == std::vector<std::string>{"P", "IY1", "T", "ER0"});
  CHECK_FALSE(dict.contains("piper"));  // alternates alone leave no entry

  fixtures::write_file(dir + "/bad.txt", "LONELY\n");
  CHECK_THROWS_AS(load_phonetic_dict(dir + "/bad.txt"), MalformedLineError);
}

TEST_CASE("subjectivity lexicon parsing") {
  auto dir = fixtures::temp_dir("subj");
  fixtures::write_file(dir + "/lex.csv",
                       "great,positive,strong\n"
                       "maybe,neutral,weak\n");
  auto lex = load_subjectivity(dir + "/lex.csv");
  REQUIRE(lex.size() == 2);
  const auto* e = lex.lookup("great");
  REQUIRE(e != nullptr);
  CHECK(e->polarity == SubjectivityEntry::Polarity::Positive);
  CHECK(e->strength == SubjectivityEntry::Strength::Strong);

  fixtures::write_file(dir + "/bad.csv", "great,sunny,strong\n");
  CHECK_THROWS_AS(load_subjectivity(dir + "/bad.csv"), MalformedLineError);
}

TEST_CASE("sense inventory parsing and symmetrization") {
  auto dir = fixtures::temp_dir("senses");
  fixtures::write_file(dir + "/counts.csv", "bank,3\nshore,2\n");
  fixtures::write_file(dir + "/sims.csv", "bank,shore,0.4\n");
  auto inv = load_senses(dir + "/counts.csv", dir + "/sims.csv");
  CHECK(inv.sense_count("bank") == 3);
  CHECK(inv.pair_similarity("bank", "shore") == 0.4);
  CHECK(inv.pair_similarity("shore", "bank") == 0.4);  // both orders
  CHECK(inv.pair_similarity("bank", "bank") == 1.0);
  CHECK(inv.pair_similarity("zzz", "zzz") == 0.0);
  CHECK(inv.pair_similarity("bank", "zzz") == 0.0);

  fixtures::write_file(dir + "/bad.csv", "a,b,1.5\n");
  CHECK_THROWS_AS(load_senses(dir + "/counts.csv", dir + "/bad.csv"),
                  SimilarityOutOfRangeError);
  fixtures::write_file(dir + "/badcount.csv", "a,0\n");
  CHECK_THROWS_AS(load_senses(dir + "/badcount.csv", dir + "/sims.csv"),
                  MalformedLineError);
}

TEST_CASE("pair similarity is symmetric for every loaded pair") {
  auto dir = fixtures::temp_dir("senses_sym");
  Rng rng(5);
  std::string counts, sims;
  std::vector<std::string> words;
  for (int i = 0; i < 20; ++i) {
    words.push_back("w" + std::to_string(i));
    counts += words.back() + "," + std::to_string(1 + rng.next_below(9)) + "\n";
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 30; ++i) {
    auto a = words[rng.next_below(words.size())];
    auto b = words[rng.next_below(words.size())];
    if (a == b) continue;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", rng.next_double());
    sims += a + "," + b + "," + buf + "\n";
    pairs.emplace_back(a, b);
  }
  fixtures::write_file(dir + "/counts.csv", counts);
  fixtures::write_file(dir + "/sims.csv", sims);
  auto inv = load_senses(dir + "/counts.csv", dir + "/sims.csv");
  for (const auto& [a, b] : pairs)
    CHECK(inv.pair_similarity(a, b) == inv.pair_similarity(b, a));
}

TEST_CASE("embedding lookups are total over arbitrary token streams") {
  auto table = fixtures::tiny_embeddings();
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    std::string tok;
    for (size_t c = 0; c < 1 + rng.next_below(6); ++c)
      tok += static_cast<char>('a' + rng.next_below(26));
    const auto& v = table.lookup(tok);
    CHECK(v.size() == table.dim());
  }
}
