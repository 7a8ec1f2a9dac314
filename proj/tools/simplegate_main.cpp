// simplegate: train, evaluate and run a classifier gate that decides
// whether a machine-simplified sentence should replace its original
// before downstream translation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simplegate/classifiers.hpp"
#include "simplegate/corpus.hpp"
#include "simplegate/evaluation.hpp"
#include "simplegate/features.hpp"
#include "simplegate/gate.hpp"
#include "simplegate/json_util.hpp"

namespace sg = simplegate;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitEngine = 3;

std::vector<sg::AnnotatedPair> load_data(const std::string& path, bool tsv) {
  return tsv ? sg::load_annotated_tsv(path) : sg::load_annotated(path);
}

sg::FeatureMatrix to_matrix(const std::vector<sg::FeatureVector>& rows) {
  sg::FeatureMatrix m;
  m.reserve(rows.size());
  for (const auto& fv : rows) m.emplace_back(fv.values.begin(), fv.values.end());
  return m;
}

struct StatsArgs {
  std::string data;
  bool tsv = false;
};

int run_stats(const StatsArgs& args) {
  sg::CorpusStats stats = sg::corpus_stats(load_data(args.data, args.tsv));
  std::cout << "Sentences      " << stats.sentence_count << '\n'
            << "Words          " << stats.word_count_source << '\t' << stats.word_count_target
            << '\n'
            << "Unique words   " << stats.unique_words_source << '\t'
            << stats.unique_words_target << '\n';
  return kExitOk;
}

struct TrainResourcesArgs {
  std::string source;
  std::string target;
  std::string out_dir;
  int em_iterations = 5;
};

int run_train_resources(const TrainResourcesArgs& args) {
  sg::ParallelCorpus corpus = sg::load_parallel(args.source, args.target);
  fs::create_directories(args.out_dir);

  sg::FeatureResources res;
  res.source_lm = sg::train_lm(corpus.source);
  res.target_lm = sg::train_lm(corpus.target);
  res.lexical_table = sg::train_model1(corpus, args.em_iterations);
  res.source_stats = sg::build_freq_stats(corpus.source, sg::Side::Source);
  res.target_stats = sg::build_freq_stats(corpus.target, sg::Side::Target);

  std::string source_hash = sg::hash_file(args.source);
  std::string target_hash = sg::hash_file(args.target);
  res.provenance = sg::to_hex(sg::fnv1a64(source_hash + ":" + target_hash + ":em=" +
                                          std::to_string(args.em_iterations)));

  nlohmann::json manifest;
  manifest["source_corpus_hash"] = source_hash;
  manifest["target_corpus_hash"] = target_hash;
  manifest["parameters"] = {{"em_iterations", args.em_iterations}, {"model1_null", false}};
  sg::save_resources(sg::ResourcePaths::in_dir(args.out_dir), res, manifest);

  std::cout << "wrote resources to " << args.out_dir << " (provenance " << res.provenance
            << ")\n";
  return kExitOk;
}

struct ExtractArgs {
  std::string data;
  bool tsv = false;
  std::string resources;
  std::string out;
  int threads = 1;
};

int run_extract(const ExtractArgs& args) {
  sg::FeatureResources res = sg::load_resources(sg::ResourcePaths::in_dir(args.resources));
  auto pairs = load_data(args.data, args.tsv);
  auto [matrix, labels] = sg::extract_batch(res, pairs, args.threads);
  sg::write_features_csv(args.out, matrix, labels);
  std::cout << "wrote " << matrix.size() << " feature rows to " << args.out << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  bool tsv = false;
  std::string resources;
  std::string classifier;
  std::string out;
  double lambda = 1e-3;
  int epochs = 50;
  std::uint64_t seed = 13;
  int threads = 1;
};

int run_train(const TrainArgs& args) {
  sg::FeatureResources res = sg::load_resources(sg::ResourcePaths::in_dir(args.resources));
  auto pairs = load_data(args.data, args.tsv);
  auto [rows, labels] = sg::extract_batch(res, pairs, args.threads);
  sg::FeatureMatrix matrix = to_matrix(rows);

  sg::ClassifierModel model;
  if (args.classifier == "nb") {
    model = sg::train_nb(matrix, labels);
  } else {
    model = sg::train_svm(matrix, labels, sg::SvmHyper{args.lambda, args.epochs, args.seed});
  }
  std::visit([&](auto& m) { m.meta.data_hash = sg::hash_file(args.data); }, model);
  sg::save_model(args.out, model);

  const sg::ModelMeta& meta =
      std::visit([](const auto& m) -> const sg::ModelMeta& { return m.meta; }, model);
  std::cout << "trained " << args.classifier << " on " << pairs.size() << " pairs ("
            << meta.n_yes << " Yes / " << meta.n_no << " No)\n";
  std::cout << "feature means:";
  for (double v : meta.feature_means) std::cout << ' ' << sg::format_double(v);
  std::cout << "\nwrote model to " << args.out << '\n';
  return kExitOk;
}

struct EvaluateArgs {
  std::string data;
  bool tsv = false;
  std::string resources;
  std::string model;
  bool json = false;
  int threads = 1;
};

int run_evaluate(const EvaluateArgs& args) {
  sg::FeatureResources res = sg::load_resources(sg::ResourcePaths::in_dir(args.resources));
  sg::ClassifierModel model = sg::load_model(args.model);

  const sg::ModelMeta& meta =
      std::visit([](const auto& m) -> const sg::ModelMeta& { return m.meta; }, model);
  if (!meta.data_hash.empty() && meta.data_hash == sg::hash_file(args.data))
    std::cerr << "warning: evaluation data matches the model's training data hash\n";

  auto pairs = load_data(args.data, args.tsv);
  auto [rows, human] = sg::extract_batch(res, pairs, args.threads);

  std::vector<sg::Label> machine;
  std::vector<double> scores;
  machine.reserve(rows.size());
  scores.reserve(rows.size());
  const bool is_nb = std::holds_alternative<sg::NBModel>(model);
  for (const auto& fv : rows) {
    sg::Prediction p = sg::predict(model, std::span<const double>(fv.values));
    machine.push_back(p.label);
    // NB emits a posterior usable as an error score; the SVM margin is
    // unbounded, so its hard label stands in.
    scores.push_back(is_nb ? p.score : (p.label == sg::Label::Yes ? 1.0 : 0.0));
  }

  sg::EvalReport rep = sg::report(human, machine, scores);
  if (args.json) {
    std::cout << sg::report_to_json(rep).dump(2) << '\n';
  } else {
    std::string title = std::string("Human - ") + (is_nb ? "Naive Bayes" : "SVM") +
                        " Classifier (" + std::to_string(pairs.size()) + " sentences)";
    std::cout << sg::render_text(rep, title);
  }
  return kExitOk;
}

struct GateArgs {
  std::string config;
  std::string input;
  std::string out;
};

int run_gate(const GateArgs& args) {
  sg::PipelineConfig config = sg::load_pipeline_config(args.config);
  sg::FeatureResources res = sg::load_resources(config.resources);
  sg::ClassifierModel model = sg::load_model(config.classifier_model);

  std::ifstream in(args.input);
  if (!in) throw sg::DataError("cannot open input file: " + args.input);

  std::ostream* out = &std::cout;
  std::ofstream out_file;
  if (!args.out.empty()) {
    out_file.open(args.out, std::ios::binary);
    if (!out_file) throw sg::DataError("cannot write output file: " + args.out);
    out = &out_file;
  }

  const sg::EngineAdapter* translator =
      config.translator ? &config.translator.value() : nullptr;
  sg::GateSummary summary = sg::run_pipeline(
      res, sg::predictor_for(model), config.simplifier, translator, in,
      [&](const sg::GateDecision& d) { *out << sg::decision_to_json(d).dump() << '\n'; });
  *out << sg::summary_to_json(summary).dump() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classifier-gated text simplification toolkit"};
  app.require_subcommand(1);

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "corpus statistics of an annotated dataset");
  stats->add_option("--data", stats_args.data, "annotated JSONL (or TSV) file")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_flag("--tsv", stats_args.tsv, "read tab-separated columns instead of JSONL");

  TrainResourcesArgs tr_args;
  CLI::App* tr = app.add_subcommand(
      "train-resources", "train LMs, lexical table and frequency stats from a parallel corpus");
  tr->add_option("--source", tr_args.source, "source-side text, one sentence per line")
      ->required()
      ->check(CLI::ExistingFile);
  tr->add_option("--target", tr_args.target, "target-side text, line-aligned with --source")
      ->required()
      ->check(CLI::ExistingFile);
  tr->add_option("--out", tr_args.out_dir, "output directory")->required();
  tr->add_option("--em-iterations", tr_args.em_iterations, "Model 1 EM iterations")
      ->check(CLI::NonNegativeNumber);

  ExtractArgs ex_args;
  CLI::App* ex = app.add_subcommand("extract", "dump the 17 features of annotated pairs to CSV");
  ex->add_option("--data", ex_args.data, "annotated JSONL (or TSV) file")
      ->required()
      ->check(CLI::ExistingFile);
  ex->add_flag("--tsv", ex_args.tsv, "read tab-separated columns instead of JSONL");
  ex->add_option("--resources", ex_args.resources, "resource directory")->required();
  ex->add_option("--out", ex_args.out, "output CSV path")->required();
  ex->add_option("--threads", ex_args.threads, "extraction threads")
      ->check(CLI::PositiveNumber);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a gating classifier");
  train->add_option("--data", train_args.data, "annotated JSONL (or TSV) file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_flag("--tsv", train_args.tsv, "read tab-separated columns instead of JSONL");
  train->add_option("--resources", train_args.resources, "resource directory")->required();
  train->add_option("--classifier", train_args.classifier, "classifier kind")
      ->required()
      ->check(CLI::IsMember({"nb", "svm"}));
  train->add_option("--out", train_args.out, "output model path")->required();
  train->add_option("--lambda", train_args.lambda, "SVM regularization strength");
  train->add_option("--epochs", train_args.epochs, "SVM training epochs")
      ->check(CLI::PositiveNumber);
  train->add_option("--seed", train_args.seed, "SVM sampling seed");
  train->add_option("--threads", train_args.threads, "extraction threads")
      ->check(CLI::PositiveNumber);

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand("evaluate", "evaluate a model against human labels");
  eval->add_option("--data", eval_args.data, "annotated JSONL (or TSV) file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_flag("--tsv", eval_args.tsv, "read tab-separated columns instead of JSONL");
  eval->add_option("--resources", eval_args.resources, "resource directory")->required();
  eval->add_option("--model", eval_args.model, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_flag("--json", eval_args.json, "emit the report as JSON");
  eval->add_option("--threads", eval_args.threads, "extraction threads")
      ->check(CLI::PositiveNumber);

  GateArgs gate_args;
  CLI::App* gate = app.add_subcommand("gate", "run the simplification gate over sentences");
  gate->add_option("--config", gate_args.config, "pipeline config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  gate->add_option("--input", gate_args.input, "input sentences, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  gate->add_option("--out", gate_args.out, "decisions JSONL path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (stats->parsed()) return run_stats(stats_args);
    if (tr->parsed()) return run_train_resources(tr_args);
    if (ex->parsed()) return run_extract(ex_args);
    if (train->parsed()) return run_train(train_args);
    if (eval->parsed()) return run_evaluate(eval_args);
    if (gate->parsed()) return run_gate(gate_args);
  } catch (const sg::EngineError& e) {
    std::cerr << "engine error: " << e.what() << '\n';
    return kExitEngine;
  } catch (const sg::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
