// Command-line front end: builds corpora from transcripts, extracts features,
// trains and evaluates the two classifiers, and runs the numeric checks.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric check failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "humor/cnn.hpp"
#include "humor/corpus.hpp"
#include "humor/eval.hpp"
#include "humor/features.hpp"
#include "humor/forest.hpp"
#include "humor/jobs.hpp"
#include "humor/resources.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace humor;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string timestamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string strip_extension(const std::string& path) {
  fs::path p(path);
  fs::path stem = p.parent_path() / p.stem();
  return stem.string();
}

struct Manifest {
  std::string command;
  uint64_t seed = 0;
  std::string started;
  json flags = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void write(const std::string& path) const {
    json j;
    j["command"] = command;
    j["tool_version"] = kVersion;
    j["seed"] = seed;
    j["started"] = started;
    j["finished"] = timestamp_now();
    j["flags"] = flags;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
  }
};

struct ResourcePaths {
  std::string embeddings;
  std::string phones;
  std::string senses;
  std::string sense_sims;
  std::string subjectivity;
  size_t embedding_dim = 300;
};

void add_resource_flags(CLI::App* cmd, ResourcePaths& paths, bool embeddings_only) {
  cmd->add_option("--embeddings", paths.embeddings, "word embedding table (text format)");
  cmd->add_option("--embedding-dim", paths.embedding_dim, "embedding width")
      ->capture_default_str();
  if (!embeddings_only) {
    cmd->add_option("--phones", paths.phones, "pronouncing dictionary");
    cmd->add_option("--senses", paths.senses, "word,sense_count csv");
    cmd->add_option("--sense-sims", paths.sense_sims, "word,word,similarity csv");
    cmd->add_option("--subjectivity", paths.subjectivity, "word,polarity,strength csv");
  }
}

struct LoadedResources {
  EmbeddingTable embeddings;
  PhoneticDictionary phones;
  SenseInventory senses;
  SubjectivityLexicon subjectivity;
  bool has_embeddings = false;
  bool has_all = false;

  // built on demand so moving/assigning LoadedResources stays safe
  Resources view() const {
    Resources r;
    if (has_embeddings) r.embeddings = &embeddings;
    if (has_all) {
      r.phones = &phones;
      r.senses = &senses;
      r.subjectivity = &subjectivity;
    }
    return r;
  }
};

void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) throw DataError(std::string("missing required flag ") + flag);
}

LoadedResources load_resources(const ResourcePaths& paths, bool need_all) {
  LoadedResources r;
  require_flag(paths.embeddings, "--embeddings");
  r.embeddings = load_embeddings(paths.embeddings, paths.embedding_dim);
  r.has_embeddings = true;
  if (need_all) {
    require_flag(paths.phones, "--phones");
    require_flag(paths.senses, "--senses");
    require_flag(paths.sense_sims, "--sense-sims");
    require_flag(paths.subjectivity, "--subjectivity");
    r.phones = load_phonetic_dict(paths.phones);
    r.senses = load_senses(paths.senses, paths.sense_sims);
    r.subjectivity = load_subjectivity(paths.subjectivity);
    r.has_all = true;
  }
  return r;
}

void add_cnn_flags(CLI::App* cmd, CnnConfig& cfg) {
  cmd->add_option("--fw", cfg.filter_width, "base filter width f_w")->capture_default_str();
  cmd->add_option("--nf", cfg.n_filters, "filters per size n_f")->capture_default_str();
  cmd->add_option("--dropout1", cfg.dropout1, "drop rate at the convolution input")
      ->capture_default_str();
  cmd->add_option("--dropout2", cfg.dropout2, "drop rate at the FC input")
      ->capture_default_str();
  cmd->add_option("--max-length", cfg.max_length,
                  "sentence length L (0: 95th percentile of training lengths)")
      ->capture_default_str();
  cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch", cfg.batch_size, "mini-batch size")->capture_default_str();
  cmd->add_option("--epochs", cfg.max_epochs, "epoch budget")->capture_default_str();
  cmd->add_option("--patience", cfg.patience, "early-stopping patience")
      ->capture_default_str();
}

void add_forest_flags(CLI::App* cmd, ForestConfig& cfg) {
  cmd->add_option("--trees", cfg.n_trees, "number of trees")->capture_default_str();
  cmd->add_option("--max-features", cfg.max_features,
                  "features per split (0: floor(sqrt(width)))")
      ->capture_default_str();
  cmd->add_option("--min-leaf", cfg.min_leaf, "minimum rows per leaf")
      ->capture_default_str();
  cmd->add_option("--max-depth", cfg.max_depth, "depth cap (0: unlimited)")
      ->capture_default_str();
}

json cnn_flags_json(const CnnConfig& c) {
  return json{{"fw", c.filter_width},     {"nf", c.n_filters},
              {"dropout1", c.dropout1},   {"dropout2", c.dropout2},
              {"max_length", c.max_length}, {"lr", c.learning_rate},
              {"batch", c.batch_size},    {"epochs", c.max_epochs},
              {"patience", c.patience}};
}

std::vector<Talk> read_transcript_dir(const std::string& dir, unsigned jobs) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no transcript files in " + dir);
  std::vector<std::string> texts(files.size());
  for (size_t i = 0; i < files.size(); ++i) {
    std::ifstream in(files[i]);
    if (!in) throw DataError("cannot open: " + files[i].string());
    texts[i].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  // parsing is pure per talk; order comes from the sorted file list
  std::vector<Talk> talks(files.size());
  parallel_for(files.size(), jobs, [&](size_t i) {
    talks[i] = parse_transcript(files[i].stem().string(), texts[i]);
  });
  return talks;
}

// ---------------------------------------------------------------- build-corpus

int cmd_build_corpus(const std::string& in_dir, const std::string& out_path,
                     size_t window, uint64_t seed, bool group_by_talk,
                     double dev_fraction, size_t k_folds, unsigned jobs) {
  Manifest manifest;
  manifest.command = "build-corpus";
  manifest.seed = seed;
  manifest.started = timestamp_now();
  manifest.flags = {{"in", in_dir},       {"window", window},
                    {"group_by_talk", group_by_talk}, {"dev_fraction", dev_fraction},
                    {"folds", k_folds}};
  manifest.inputs = {in_dir};

  auto talks = read_transcript_dir(in_dir, jobs);
  BuildReport report;
  Corpus corpus = sample_balanced(talks, window, seed, &report);
  save_corpus_jsonl(corpus, out_path);
  std::string base = strip_extension(out_path);
  manifest.outputs = {out_path};

  const Corpus* fold_source = &corpus;
  Corpus dev, cv;
  if (dev_fraction > 0.0) {
    std::tie(dev, cv) = split_dev_cv(corpus, dev_fraction, group_by_talk, seed);
    save_corpus_jsonl(dev, base + ".dev.jsonl");
    save_corpus_jsonl(cv, base + ".cv.jsonl");
    manifest.outputs.push_back(base + ".dev.jsonl");
    manifest.outputs.push_back(base + ".cv.jsonl");
    fold_source = &cv;
  }
  FoldPlan plan = make_folds(*fold_source, k_folds, group_by_talk, seed);
  save_fold_plan(plan, base + ".folds.json");
  save_build_report(report, base + ".report.json");
  manifest.outputs.push_back(base + ".folds.json");
  manifest.outputs.push_back(base + ".report.json");
  manifest.write(base + ".manifest.json");

  std::printf("talks %zu, sentences %zu, positives %zu, pairs %zu, dropped %zu\n",
              report.talks, report.sentences, report.positives_found, report.pairs_made,
              report.dropped_positives);
  std::printf("corpus %zu instances -> %s\n", corpus.instances.size(), out_path.c_str());
  return 0;
}

// ------------------------------------------------------------ extract-features

int cmd_extract_features(const std::string& corpus_path, const ResourcePaths& paths,
                         const std::string& out_csv, const std::string& out_bin,
                         size_t knn_k, unsigned jobs, uint64_t seed) {
  Manifest manifest;
  manifest.command = "extract-features";
  manifest.seed = seed;
  manifest.started = timestamp_now();
  manifest.flags = {{"corpus", corpus_path}, {"knn_k", knn_k}, {"jobs", jobs}};
  manifest.inputs = {corpus_path};

  Corpus corpus = load_corpus_jsonl(corpus_path);
  auto resources = load_resources(paths, true);
  // whole-corpus dump: the reference is the corpus itself, self-excluded
  TrainReference ref = build_train_reference(corpus.instances, resources.embeddings);
  FeatureMatrix matrix = extract_matrix(corpus.instances, resources.view(), ref, knn_k, jobs);
  save_feature_csv(matrix, out_csv);
  manifest.outputs = {out_csv};
  if (!out_bin.empty()) {
    save_feature_binary(matrix, out_bin + ".f64", out_bin + ".json");
    manifest.outputs.push_back(out_bin + ".f64");
    manifest.outputs.push_back(out_bin + ".json");
  }
  manifest.write(strip_extension(out_csv) + ".manifest.json");
  std::printf("features %zu x %zu -> %s\n", matrix.rows, matrix.cols, out_csv.c_str());
  return 0;
}

// ------------------------------------------------------------------- train

int cmd_train(const std::string& model_kind, const std::string& corpus_path,
              const std::string& features_path, const ResourcePaths& paths,
              ForestConfig forest_cfg, CnnConfig cnn_cfg, uint64_t seed,
              unsigned jobs, const std::string& out_path) {
  Manifest manifest;
  manifest.command = "train";
  manifest.seed = seed;
  manifest.started = timestamp_now();
  std::string base = strip_extension(out_path);

  if (model_kind == "rf") {
    require_flag(features_path, "--features");
    FeatureMatrix matrix;
    if (features_path.size() > 4 &&
        features_path.substr(features_path.size() - 4) == ".f64") {
      matrix = load_feature_binary(features_path,
                                   strip_extension(features_path) + ".json");
    } else {
      matrix = load_feature_csv(features_path);
    }
    forest_cfg.seed = seed;
    bool single_class = false;
    ForestModel model = train_forest(matrix, forest_cfg, jobs, &single_class);
    if (single_class)
      std::fprintf(stderr, "warning: single-class training labels; the forest always "
                           "predicts that class\n");
    save_forest(model, out_path);
    manifest.flags = {{"model", "rf"},
                      {"features", features_path},
                      {"trees", model.config.n_trees},
                      {"max_features", model.config.max_features},
                      {"min_leaf", model.config.min_leaf},
                      {"max_depth", model.config.max_depth},
                      {"jobs", jobs}};
    manifest.inputs = {features_path};
    manifest.outputs = {out_path};
    manifest.write(base + ".manifest.json");
    std::printf("random forest: %zu trees on %zu features -> %s\n",
                model.trees.size(), model.feature_width, out_path.c_str());
    return 0;
  }

  // cnn
  require_flag(corpus_path, "--corpus");
  Corpus corpus = load_corpus_jsonl(corpus_path);
  auto resources = load_resources(paths, false);
  cnn_cfg.seed = seed;
  TrainingReport report;
  CnnModel model = train_cnn_on_corpus(corpus.instances, resources.embeddings, cnn_cfg,
                                       &report);
  save_cnn(model, out_path);
  save_training_report(report, base + ".report.json");
  manifest.flags = cnn_flags_json(model.config);
  manifest.flags["model"] = "cnn";
  manifest.flags["corpus"] = corpus_path;
  manifest.inputs = {corpus_path, paths.embeddings};
  manifest.outputs = {out_path, base + ".report.json"};
  manifest.write(base + ".manifest.json");
  std::printf("cnn: L=%zu, stopped at epoch %zu (best %zu) -> %s\n",
              model.config.max_length, report.stopped_epoch, report.best_epoch,
              out_path.c_str());
  return 0;
}

// ----------------------------------------------------------------- evaluate

int cmd_evaluate(const std::string& corpus_path, const std::string& plan_path,
                 size_t k_folds, bool group_by_talk, const std::string& kinds_csv,
                 const ResourcePaths& paths, ForestConfig forest_cfg, CnnConfig cnn_cfg,
                 size_t knn_k, uint64_t seed, unsigned jobs,
                 const std::string& out_base) {
  Manifest manifest;
  manifest.command = "evaluate";
  manifest.seed = seed;
  manifest.started = timestamp_now();
  manifest.inputs = {corpus_path};

  Corpus corpus = load_corpus_jsonl(corpus_path);
  FoldPlan plan;
  if (!plan_path.empty()) {
    plan = load_fold_plan(plan_path);
    manifest.inputs.push_back(plan_path);
  } else {
    plan = make_folds(corpus, k_folds, group_by_talk, seed);
  }

  std::vector<ModelKind> kinds;
  std::stringstream ss(kinds_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) kinds.push_back(model_kind_from_string(item));
  }
  if (kinds.empty()) throw DataError("no model kinds requested");

  bool need_all = false, need_embeddings = false;
  for (ModelKind kind : kinds) {
    if (kind == ModelKind::Base) need_all = true;
    if (kind == ModelKind::Cnn) need_embeddings = true;
  }
  LoadedResources resources;
  if (need_all || need_embeddings) resources = load_resources(paths, need_all);

  CvConfig cv_cfg;
  cv_cfg.forest = forest_cfg;
  cv_cfg.cnn = cnn_cfg;
  cv_cfg.knn_k = knn_k;

  std::vector<std::pair<std::string, Metrics>> rows;
  for (ModelKind kind : kinds) {
    CvResult result = run_cv(corpus, plan, kind, cv_cfg, resources.view(), seed, jobs);
    rows.emplace_back(model_kind_name(kind), result.aggregate);
    if (!out_base.empty()) {
      std::string path = out_base + "." + model_kind_name(kind) + ".json";
      save_cv_result(result, path);
      manifest.outputs.push_back(path);
    }
  }
  std::printf("%s", format_metrics_table(rows).c_str());
  manifest.flags = {{"kinds", kinds_csv}, {"k", plan.k},
                    {"group_by_talk", group_by_talk}, {"jobs", jobs},
                    {"cnn", cnn_flags_json(cnn_cfg)},
                    {"trees", forest_cfg.n_trees}};
  if (!out_base.empty()) manifest.write(out_base + ".manifest.json");
  return 0;
}

// ------------------------------------------------------------------ predict

int cmd_predict(const std::string& model_path, const std::string& in_path,
                const ResourcePaths& paths, const std::string& train_corpus_path,
                size_t knn_k, unsigned jobs, const std::string& out_path) {
  std::ifstream model_file(model_path);
  if (!model_file) throw DataError("cannot open: " + model_path);
  json header;
  try {
    model_file >> header;
  } catch (const json::exception& e) {
    throw DataError(model_path + ": " + e.what());
  }
  std::string kind = header.value("kind", "");

  std::ifstream in(in_path);
  if (!in) throw DataError("cannot open: " + in_path);
  std::vector<std::string> sentences;
  std::string line;
  while (std::getline(in, line)) sentences.push_back(line);

  std::ostream* out = &std::cout;
  std::ofstream out_file;
  if (!out_path.empty()) {
    out_file.open(out_path);
    if (!out_file) throw DataError("cannot open for writing: " + out_path);
    out = &out_file;
  }

  // one result slot per sentence keeps parallel prediction order-stable
  std::vector<std::pair<Label, double>> results(sentences.size());
  if (kind == "cnn") {
    CnnModel model = load_cnn(model_path);
    auto resources = load_resources(paths, false);
    if (resources.embeddings.dim() != model.config.embedding_dim)
      throw DataError("embedding table width does not match the model");
    parallel_for(sentences.size(), jobs, [&](size_t i) {
      auto matrix = embed_sentence(tokenize(sentences[i]), resources.embeddings,
                                   model.config.max_length);
      auto [label, proba] = predict_cnn(model, matrix);
      results[i] = {label, proba[0]};
    });
  } else if (kind == "random_forest") {
    ForestModel model = load_forest(model_path);
    require_flag(train_corpus_path, "--train-corpus");
    auto resources = load_resources(paths, true);
    Corpus train = load_corpus_jsonl(train_corpus_path);
    TrainReference ref = build_train_reference(train.instances, resources.embeddings);
    parallel_for(sentences.size(), jobs, [&](size_t i) {
      LabeledInstance inst;
      inst.talk_id = "(stdin)";
      inst.tokens = tokenize(sentences[i]);
      auto row = extract_features(inst, resources.view(), ref, knn_k);
      auto proba = predict_proba(model, row);
      results[i] = {proba[0] > proba[1] ? Label::Laughter : Label::NoLaughter, proba[0]};
    });
  } else {
    throw DataError(model_path + ": unknown model kind '" + kind + "'");
  }
  char buf[64];
  for (const auto& [label, p_laughter] : results) {
    std::snprintf(buf, sizeof(buf), "%s\t%.6f\n", label_to_string(label).c_str(),
                  p_laughter);
    *out << buf;
  }
  return 0;
}

// ---------------------------------------------------------------- grad-check

int cmd_grad_check(size_t fw, size_t nf, size_t L, size_t d, double dropout1,
                   double dropout2, uint64_t seed, size_t samples,
                   const std::string& out_path) {
  CnnConfig cfg;
  cfg.filter_width = fw;
  cfg.n_filters = nf;
  cfg.max_length = L;
  cfg.embedding_dim = d;
  cfg.dropout1 = dropout1;
  cfg.dropout2 = dropout2;
  auto result = gradient_check(cfg, seed, samples);
  std::printf("max relative error %.3e over %zu parameters\n", result.max_rel_error,
              result.checked);
  if (!out_path.empty()) {
    json j;
    j["max_rel_error"] = result.max_rel_error;
    j["checked"] = result.checked;
    j["threshold"] = 1e-4;
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot open for writing: " + out_path);
    out << j.dump(2) << "\n";
  }
  if (!(result.max_rel_error < 1e-4)) {
    std::fprintf(stderr, "gradient check FAILED (>= 1e-4)\n");
    return kExitNumeric;
  }
  return 0;
}

// ------------------------------------------------------------- search-hparams

int cmd_search(const std::string& dev_path, const ResourcePaths& paths,
               HyperSpace space, CnnConfig base_cfg, const std::string& out_path) {
  Manifest manifest;
  manifest.command = "search-hparams";
  manifest.seed = space.seed;
  manifest.started = timestamp_now();
  manifest.inputs = {dev_path};

  Corpus dev = load_corpus_jsonl(dev_path);
  auto resources = load_resources(paths, false);
  SearchResult result =
      search_hyperparams(space, dev, ModelKind::Cnn, resources.view(), base_cfg);
  std::string base = strip_extension(out_path);
  save_search_result(result, out_path, base + ".trials.jsonl");
  manifest.flags = {{"budget", space.budget},
                    {"fw", {space.filter_width.lo, space.filter_width.hi}},
                    {"nf", {space.n_filters.lo, space.n_filters.hi}},
                    {"dropout1", {space.dropout1.lo, space.dropout1.hi}},
                    {"dropout2", {space.dropout2.lo, space.dropout2.hi}},
                    {"lr", {space.learning_rate.lo, space.learning_rate.hi}}};
  manifest.outputs = {out_path, base + ".trials.jsonl"};
  manifest.write(base + ".manifest.json");
  std::printf("best trial %zu: accuracy %.4f, fw=%zu nf=%zu d1=%.3f d2=%.3f lr=%.5f\n",
              result.best_trial, result.best_accuracy, result.best_config.filter_width,
              result.best_config.n_filters, result.best_config.dropout1,
              result.best_config.dropout2, result.best_config.learning_rate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"humor recognition pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // ---- build-corpus
  auto* build = app.add_subcommand("build-corpus",
                                   "parse transcripts and emit a balanced corpus");
  std::string in_dir, out_path;
  size_t window = 7;
  uint64_t seed = 0;
  bool group_by_talk = false;
  double dev_fraction = 0.1;
  size_t k_folds = 10;
  unsigned jobs = 1;
  build->add_option("--in", in_dir, "directory of transcript .txt files")->required();
  build->add_option("--out", out_path, "corpus JSONL output path")->required();
  build->add_option("--window", window, "negative sampling window")->capture_default_str();
  build->add_option("--seed", seed, "master seed")->capture_default_str();
  build->add_flag("--group-by-talk", group_by_talk,
                  "keep each talk inside one split/fold");
  build->add_option("--dev-fraction", dev_fraction,
                    "dev share of instances (0 skips the dev/cv split)")
      ->capture_default_str();
  build->add_option("--folds", k_folds, "fold count for the emitted plan")
      ->capture_default_str();
  build->add_option("--jobs", jobs, "worker threads for parsing")->capture_default_str();

  // ---- extract-features
  auto* extract = app.add_subcommand("extract-features",
                                     "compute the conventional feature matrix");
  std::string corpus_path, out_csv, out_bin;
  ResourcePaths extract_paths;
  size_t knn_k = 5;
  extract->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  extract->add_option("--out", out_csv, "feature CSV output")->required();
  extract->add_option("--bin", out_bin, "also write <bin>.f64 + <bin>.json");
  extract->add_option("--knn-k", knn_k, "neighbour count")->capture_default_str();
  extract->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  extract->add_option("--seed", seed, "recorded in the manifest")->capture_default_str();
  add_resource_flags(extract, extract_paths, false);

  // ---- train
  auto* train = app.add_subcommand("train", "train a classifier");
  std::string model_kind, features_path, train_corpus;
  ResourcePaths train_paths;
  ForestConfig forest_cfg;
  CnnConfig cnn_cfg;
  train->add_option("--model", model_kind, "rf or cnn")
      ->required()
      ->check(CLI::IsMember({"rf", "cnn"}));
  train->add_option("--features", features_path, "feature file for rf (.csv or .f64)");
  train->add_option("--corpus", train_corpus, "corpus JSONL for cnn");
  train->add_option("--out", out_path, "model output path")->required();
  train->add_option("--seed", seed, "master seed")->capture_default_str();
  train->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  add_resource_flags(train, train_paths, true);
  add_forest_flags(train, forest_cfg);
  add_cnn_flags(train, cnn_cfg);

  // ---- evaluate
  auto* evaluate = app.add_subcommand("evaluate", "cross-validated comparison");
  std::string eval_corpus, plan_path, kinds_csv = "chance,base,cnn", eval_out;
  ResourcePaths eval_paths;
  ForestConfig eval_forest;
  CnnConfig eval_cnn;
  size_t eval_k = 10;
  bool eval_grouped = false;
  evaluate->add_option("--corpus", eval_corpus, "corpus JSONL (the CV part)")->required();
  evaluate->add_option("--fold-plan", plan_path, "fold plan JSON (else folds are built)");
  evaluate->add_option("--k", eval_k, "fold count when building folds")
      ->capture_default_str();
  evaluate->add_flag("--group-by-talk", eval_grouped, "talk-grouped folds");
  evaluate->add_option("--kinds", kinds_csv, "comma list of chance,base,cnn")
      ->capture_default_str();
  evaluate->add_option("--knn-k", knn_k, "neighbour count for base features")
      ->capture_default_str();
  evaluate->add_option("--out", eval_out, "basename for CvResult JSON files");
  evaluate->add_option("--seed", seed, "master seed")->capture_default_str();
  evaluate->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  add_resource_flags(evaluate, eval_paths, false);
  add_forest_flags(evaluate, eval_forest);
  add_cnn_flags(evaluate, eval_cnn);

  // ---- predict
  auto* predict = app.add_subcommand("predict", "label sentences, one per line");
  std::string model_path, predict_in, predict_out, predict_train_corpus;
  ResourcePaths predict_paths;
  predict->add_option("--model", model_path, "model file (rf or cnn)")->required();
  predict->add_option("--in", predict_in, "sentence file, one per line")->required();
  predict->add_option("--out", predict_out, "output path (default stdout)");
  predict->add_option("--train-corpus", predict_train_corpus,
                      "training corpus JSONL (rf only, for the kNN reference)");
  predict->add_option("--knn-k", knn_k, "neighbour count (rf)")->capture_default_str();
  predict->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  add_resource_flags(predict, predict_paths, false);

  // ---- grad-check
  auto* grad = app.add_subcommand("grad-check",
                                  "compare backward() to finite differences");
  size_t gc_fw = 3, gc_nf = 3, gc_L = 10, gc_d = 8, gc_samples = 0;
  double gc_d1 = 0.7, gc_d2 = 0.35;
  std::string gc_out;
  grad->add_option("--fw", gc_fw, "base filter width")->capture_default_str();
  grad->add_option("--nf", gc_nf, "filters per size")->capture_default_str();
  grad->add_option("--max-length", gc_L, "sentence length L")->capture_default_str();
  grad->add_option("--dim", gc_d, "embedding width d")->capture_default_str();
  grad->add_option("--dropout1", gc_d1, "conv-input drop rate")->capture_default_str();
  grad->add_option("--dropout2", gc_d2, "FC-input drop rate")->capture_default_str();
  grad->add_option("--samples", gc_samples, "parameters to probe (0: all)")
      ->capture_default_str();
  grad->add_option("--seed", seed, "fixture seed")->capture_default_str();
  grad->add_option("--out", gc_out, "result JSON path");

  // ---- search-hparams
  auto* search = app.add_subcommand("search-hparams", "seeded random search (cnn)");
  std::string dev_path, search_out;
  ResourcePaths search_paths;
  HyperSpace space;
  CnnConfig search_base;
  search->add_option("--dev", dev_path, "dev corpus JSONL")->required();
  search->add_option("--out", search_out, "best-config JSON output")->required();
  search->add_option("--budget", space.budget, "trial count")->capture_default_str();
  search->add_option("--seed", space.seed, "search seed")->capture_default_str();
  search->add_option("--fw-min", space.filter_width.lo)->capture_default_str();
  search->add_option("--fw-max", space.filter_width.hi)->capture_default_str();
  search->add_option("--nf-min", space.n_filters.lo)->capture_default_str();
  search->add_option("--nf-max", space.n_filters.hi)->capture_default_str();
  search->add_option("--dropout1-min", space.dropout1.lo)->capture_default_str();
  search->add_option("--dropout1-max", space.dropout1.hi)->capture_default_str();
  search->add_option("--dropout2-min", space.dropout2.lo)->capture_default_str();
  search->add_option("--dropout2-max", space.dropout2.hi)->capture_default_str();
  search->add_option("--lr-min", space.learning_rate.lo)->capture_default_str();
  search->add_option("--lr-max", space.learning_rate.hi)->capture_default_str();
  add_resource_flags(search, search_paths, true);
  add_cnn_flags(search, search_base);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (build->parsed())
      return cmd_build_corpus(in_dir, out_path, window, seed, group_by_talk,
                              dev_fraction, k_folds, jobs);
    if (extract->parsed())
      return cmd_extract_features(corpus_path, extract_paths, out_csv, out_bin, knn_k,
                                  jobs, seed);
    if (train->parsed())
      return cmd_train(model_kind, train_corpus, features_path, train_paths, forest_cfg,
                       cnn_cfg, seed, jobs, out_path);
    if (evaluate->parsed())
      return cmd_evaluate(eval_corpus, plan_path, eval_k, eval_grouped, kinds_csv,
                          eval_paths, eval_forest, eval_cnn, knn_k, seed, jobs,
                          eval_out);
    if (predict->parsed())
      return cmd_predict(model_path, predict_in, predict_paths, predict_train_corpus,
                         knn_k, jobs, predict_out);
    if (grad->parsed())
      return cmd_grad_check(gc_fw, gc_nf, gc_L, gc_d, gc_d1, gc_d2, seed, gc_samples,
                            gc_out);
    if (search->parsed())
      return cmd_search(dev_path, search_paths, space, search_base, search_out);
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return 0;
}
