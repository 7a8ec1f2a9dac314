#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "simplegate/classifiers.hpp"
#include "simplegate/corpus.hpp"
#include "simplegate/engine.hpp"
#include "simplegate/features.hpp"
#include "simplegate/text.hpp"

namespace testutil {

inline simplegate::Sentence sent(const std::string& text) {
  return simplegate::tokenize(text);
}

inline std::vector<simplegate::Sentence> sents(const std::vector<std::string>& lines) {
  std::vector<simplegate::Sentence> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(simplegate::tokenize(l));
  return out;
}

inline simplegate::ParallelCorpus parallel(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  simplegate::ParallelCorpus corpus;
  for (const auto& [s, t] : pairs) {
    corpus.source.push_back(simplegate::tokenize(s));
    corpus.target.push_back(simplegate::tokenize(t));
  }
  return corpus;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<std::uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("simplegate_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Portable standard normal via Box-Muller over mt19937_64.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double uniform01() {
    // (0, 1], keeps log() finite
    return (static_cast<double>(rng_() >> 11) + 1.0) / 9007199254740993.0;
  }

  std::uint64_t raw() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Two 17-D Gaussian blobs, unit variance, means separated by 4 along the
// first axis. Yes points around +2, No around -2.
struct BlobData {
  std::vector<std::vector<double>> rows;
  std::vector<simplegate::Label> labels;
};

inline BlobData make_blobs(std::size_t n, std::size_t dim, std::uint64_t seed) {
  BlobData data;
  NormalSampler normal(seed);
  for (std::size_t i = 0; i < n; ++i) {
    bool yes = i % 2 == 0;
    std::vector<double> row(dim);
    for (std::size_t d = 0; d < dim; ++d) row[d] = normal();
    row[0] += yes ? 2.0 : -2.0;
    data.rows.push_back(std::move(row));
    data.labels.push_back(yes ? simplegate::Label::Yes : simplegate::Label::No);
  }
  return data;
}

// Two-pair corpus small enough that every derived quantity can be worked
// out by hand; the lexical table is the single-iteration EM table.
inline simplegate::ParallelCorpus toy_corpus() {
  return parallel({{"the house", "das haus"}, {"the", "das"}});
}

inline simplegate::FeatureResources toy_resources(int em_iterations = 1) {
  simplegate::ParallelCorpus corpus = toy_corpus();
  simplegate::FeatureResources res;
  res.source_lm = simplegate::train_lm(corpus.source);
  res.target_lm = simplegate::train_lm(corpus.target);
  res.lexical_table = simplegate::train_model1(corpus, em_iterations);
  res.source_stats = simplegate::build_freq_stats(corpus.source, simplegate::Side::Source);
  res.target_stats = simplegate::build_freq_stats(corpus.target, simplegate::Side::Target);
  return res;
}

// Zero-weight SVMs: with a zero margin the tie rule labels No, and a
// positive bias labels Yes. Handy as deterministic stub classifiers.
inline simplegate::SVMModel stub_svm(std::size_t dim, double bias) {
  simplegate::SVMModel model;
  model.weights.assign(dim, 0.0);
  model.bias = bias;
  model.standardizer.mean.assign(dim, 0.0);
  model.standardizer.stddev.assign(dim, 1.0);
  model.meta.n_yes = 1;
  model.meta.n_no = 1;
  return model;
}

inline simplegate::ClassifierModel always_yes(std::size_t dim) {
  return stub_svm(dim, 1.0);
}

inline simplegate::ClassifierModel always_no(std::size_t dim) {
  return stub_svm(dim, 0.0);
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& arg) {
  std::string quoted = "'";
  for (char c : arg) {
    if (c == '\'')
      quoted += "'\\''";
    else
      quoted.push_back(c);
  }
  quoted.push_back('\'');
  return quoted;
}

// Runs the built CLI with the given arguments and captures the result.
inline CliResult run_cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::string cmd = shell_quote(SIMPLEGATE_CLI_PATH);
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  simplegate::ExecResult res = simplegate::run_line_command(cmd, input, 120.0);
  return {res.exit_code, res.out, res.err};
}

inline std::string fixture(const std::string& name) {
  return std::string(SIMPLEGATE_FIXTURES_DIR) + "/" + name;
}

}  // namespace testutil
