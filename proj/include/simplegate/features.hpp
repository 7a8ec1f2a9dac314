#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "simplegate/common.hpp"
#include "simplegate/corpus.hpp"
#include "simplegate/freq_stats.hpp"
#include "simplegate/json_util.hpp"
#include "simplegate/lexicon.hpp"
#include "simplegate/ngram_lm.hpp"
#include "simplegate/text.hpp"

namespace simplegate {

inline constexpr std::size_t kFeatureCount = 17;

// Ordered feature vector. Index i holds feature i+1:
//   1  source token count
//   2  target token count
//   3  mean source token length (characters)
//   4  source trigram LM score (mean log10 probability)
//   5  target trigram LM score
//   6  fraction of target tokens present in the target corpus
//   7  avg translations per source token with p >= 0.2
//   8  avg translations per source token with p >= 0.1
//   9  % low-frequency source unigrams
//   10 % high-frequency source unigrams
//   11 % low-frequency source bigrams
//   12 % high-frequency source bigrams
//   13 % low-frequency source trigrams
//   14 % high-frequency source trigrams
//   15 % source tokens present in the source corpus
//   16 source punctuation count
//   17 target punctuation count
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const FeatureVector&) const = default;
};

struct FeatureResources {
  TrigramLM source_lm;
  TrigramLM target_lm;
  LexicalTable lexical_table;
  FrequencyStats source_stats;
  FrequencyStats target_stats;
  std::string provenance;  // shared hash of the declared training corpus
};

struct SurfaceFeatures {
  double source_tokens = 0.0;
  double target_tokens = 0.0;
  double avg_source_token_length = 0.0;
  double source_punct = 0.0;
  double target_punct = 0.0;
};

inline SurfaceFeatures surface_features(const Sentence& source, const Sentence& target) {
  if (source.empty() || target.empty()) throw DataError("empty sentence");
  SurfaceFeatures f;
  f.source_tokens = static_cast<double>(source.size());
  f.target_tokens = static_cast<double>(target.size());
  long long chars = 0, src_punct = 0, tgt_punct = 0;
  for (const Token& t : source) {
    chars += static_cast<long long>(utf8::codepoint_count(t.surface));
    if (t.is_punct) ++src_punct;
  }
  for (const Token& t : target)
    if (t.is_punct) ++tgt_punct;
  f.avg_source_token_length = static_cast<double>(chars) / static_cast<double>(source.size());
  f.source_punct = static_cast<double>(src_punct);
  f.target_punct = static_cast<double>(tgt_punct);
  return f;
}

inline FeatureVector extract_features(const FeatureResources& res, const Sentence& source,
                                      const Sentence& target,
                                      std::vector<std::string>* diagnostics = nullptr) {
  SurfaceFeatures surf = surface_features(source, target);
  FeatureVector fv;
  fv.values[0] = surf.source_tokens;
  fv.values[1] = surf.target_tokens;
  fv.values[2] = surf.avg_source_token_length;
  fv.values[3] = lm_feature(res.source_lm, source);
  fv.values[4] = lm_feature(res.target_lm, target);
  fv.values[5] = target_presence_feature(res.target_stats, target);
  fv.values[6] = avg_translations_feature(res.lexical_table, source, 0.2);
  fv.values[7] = avg_translations_feature(res.lexical_table, source, 0.1);
  for (int n = 1; n <= 3; ++n) {
    PctResult low = low_freq_pct(res.source_stats, source, n);
    PctResult high = high_freq_pct(res.source_stats, source, n);
    fv.values[static_cast<std::size_t>(6 + 2 * n)] = low.value;
    fv.values[static_cast<std::size_t>(7 + 2 * n)] = high.value;
    if (low.degenerate && diagnostics)
      diagnostics->push_back("features " + std::to_string(7 + 2 * n) + "-" +
                             std::to_string(8 + 2 * n) + ": sentence shorter than n=" +
                             std::to_string(n) + ", defaulted to 0");
  }
  fv.values[14] = words_in_corpus_pct(res.source_stats, source);
  fv.values[15] = surf.source_punct;
  fv.values[16] = surf.target_punct;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(fv.values[i]))
      throw DataError("feature " + std::to_string(i + 1) + " is not finite");
  }
  return fv;
}

// Row order matches input order regardless of thread count; rows are
// written by index so parallel and serial runs are bitwise identical.
inline std::pair<std::vector<FeatureVector>, std::vector<Label>> extract_batch(
    const FeatureResources& res, const std::vector<AnnotatedPair>& pairs, int threads = 1) {
  const std::size_t n = pairs.size();
  std::vector<FeatureVector> matrix(n);
  std::vector<Label> labels(n);
  if (threads < 1) threads = 1;
  if (static_cast<std::size_t>(threads) > n && n > 0) threads = static_cast<int>(n);

  std::vector<std::vector<std::string>> errors(static_cast<std::size_t>(threads));
  auto worker = [&](std::size_t tid, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        matrix[i] = extract_features(res, pairs[i].source, pairs[i].target);
        labels[i] = pairs[i].label;
      } catch (const std::exception& e) {
        errors[tid].push_back("row " + std::to_string(i) + ": " + e.what());
      }
    }
  };
  if (threads == 1 || n == 0) {
    worker(0, 0, n);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) /
                        static_cast<std::size_t>(threads);
    for (std::size_t t = 0; t < static_cast<std::size_t>(threads); ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, t, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  std::vector<std::string> all_errors;
  for (const auto& errs : errors) all_errors.insert(all_errors.end(), errs.begin(), errs.end());
  if (!all_errors.empty()) {
    std::string msg = "feature extraction failed: " + all_errors.front();
    if (all_errors.size() > 1)
      msg += " (and " + std::to_string(all_errors.size() - 1) + " more rows)";
    throw DataError(msg);
  }
  return {std::move(matrix), std::move(labels)};
}

// CSV dump: header f1..f17,label.
inline void write_features_csv(const std::string& path,
                               const std::vector<FeatureVector>& matrix,
                               const std::vector<Label>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (std::size_t i = 0; i < kFeatureCount; ++i) out << 'f' << (i + 1) << ',';
  out << "label\n";
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      out << format_double(matrix[r].values[i]) << ',';
    out << to_string(labels[r]) << '\n';
  }
}

struct ResourcePaths {
  std::string source_lm;
  std::string target_lm;
  std::string lexical_table;
  std::string source_stats;
  std::string target_stats;
  std::string manifest;

  static ResourcePaths in_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    ResourcePaths p;
    p.source_lm = (fs::path(dir) / "source_lm.json").string();
    p.target_lm = (fs::path(dir) / "target_lm.json").string();
    p.lexical_table = (fs::path(dir) / "lexical_table.json").string();
    p.source_stats = (fs::path(dir) / "source_stats.json").string();
    p.target_stats = (fs::path(dir) / "target_stats.json").string();
    p.manifest = (fs::path(dir) / "manifest.json").string();
    return p;
  }
};

inline void save_resources(const ResourcePaths& paths, const FeatureResources& res,
                           const nlohmann::json& manifest_extra = nlohmann::json::object()) {
  auto with_provenance = [&](nlohmann::json j) {
    j["provenance"] = res.provenance;
    return j;
  };
  write_json_file(paths.source_lm, with_provenance(lm_to_json(res.source_lm)));
  write_json_file(paths.target_lm, with_provenance(lm_to_json(res.target_lm)));
  write_json_file(paths.lexical_table, with_provenance(lexicon_to_json(res.lexical_table)));
  write_json_file(paths.source_stats, with_provenance(freq_stats_to_json(res.source_stats)));
  write_json_file(paths.target_stats, with_provenance(freq_stats_to_json(res.target_stats)));
  if (!paths.manifest.empty()) {
    nlohmann::json manifest = manifest_extra;
    manifest["version"] = kFormatVersion;
    manifest["kind"] = "resource_manifest";
    manifest["provenance"] = res.provenance;
    write_json_file(paths.manifest, manifest);
  }
}

inline FeatureResources load_resources(const ResourcePaths& paths) {
  FeatureResources res;
  auto provenance_of = [](const nlohmann::json& j) {
    return j.contains("provenance") ? j["provenance"].get<std::string>() : std::string();
  };
  nlohmann::json j = load_json_file(paths.source_lm);
  res.source_lm = lm_from_json(j);
  res.provenance = provenance_of(j);
  j = load_json_file(paths.target_lm);
  res.target_lm = lm_from_json(j);
  if (provenance_of(j) != res.provenance) throw DataError("resource provenance mismatch");
  j = load_json_file(paths.lexical_table);
  res.lexical_table = lexicon_from_json(j);
  if (provenance_of(j) != res.provenance) throw DataError("resource provenance mismatch");
  j = load_json_file(paths.source_stats);
  res.source_stats = freq_stats_from_json(j);
  if (provenance_of(j) != res.provenance) throw DataError("resource provenance mismatch");
  j = load_json_file(paths.target_stats);
  res.target_stats = freq_stats_from_json(j);
  if (provenance_of(j) != res.provenance) throw DataError("resource provenance mismatch");
  return res;
}

}  // namespace simplegate
