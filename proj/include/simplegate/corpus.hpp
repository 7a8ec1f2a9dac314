#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "simplegate/common.hpp"
#include "simplegate/text.hpp"

namespace simplegate {

struct AnnotatedPair {
  Sentence source;
  Sentence target;
  Label label = Label::No;
};

struct CorpusStats {
  long long sentence_count = 0;
  long long word_count_source = 0;
  long long word_count_target = 0;
  long long unique_words_source = 0;
  long long unique_words_target = 0;
};

namespace detail {

inline AnnotatedPair make_pair_checked(const std::string& source_text,
                                       const std::string& target_text,
                                       const std::string& label_text,
                                       std::size_t line_no) {
  AnnotatedPair pair;
  try {
    pair.label = parse_label(label_text);
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
  }
  pair.source = tokenize(source_text);
  pair.target = tokenize(target_text);
  if (pair.source.empty())
    throw DataError("empty source sentence at line " + std::to_string(line_no));
  if (pair.target.empty())
    throw DataError("empty target sentence at line " + std::to_string(line_no));
  return pair;
}

}  // namespace detail

// JSONL: one {"source":..., "target":..., "label":"Yes"|"No"} object per line.
inline std::vector<AnnotatedPair> load_annotated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotated file: " + path);
  std::vector<AnnotatedPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("source") || !obj.contains("target") ||
        !obj.contains("label") || !obj["source"].is_string() ||
        !obj["target"].is_string() || !obj["label"].is_string()) {
      throw DataError("malformed line " + std::to_string(line_no) +
                      ": expected {source, target, label} strings");
    }
    pairs.push_back(detail::make_pair_checked(obj["source"].get<std::string>(),
                                              obj["target"].get<std::string>(),
                                              obj["label"].get<std::string>(), line_no));
  }
  return pairs;
}

// Three tab-separated columns: English, Simple English, Yes/No.
inline std::vector<AnnotatedPair> load_annotated_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotated file: " + path);
  std::vector<AnnotatedPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos ||
        line.find('\t', t2 + 1) != std::string::npos) {
      throw DataError("expected 3 tab-separated columns at line " + std::to_string(line_no));
    }
    pairs.push_back(detail::make_pair_checked(line.substr(0, t1),
                                              line.substr(t1 + 1, t2 - t1 - 1),
                                              line.substr(t2 + 1), line_no));
  }
  return pairs;
}

inline void write_annotated(const std::string& path, const std::vector<AnnotatedPair>& pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write annotated file: " + path);
  for (const AnnotatedPair& p : pairs) {
    nlohmann::json obj;
    obj["source"] = detokenize(p.source);
    obj["target"] = detokenize(p.target);
    obj["label"] = to_string(p.label);
    out << obj.dump() << '\n';
  }
}

// Two plain-text files, one sentence per line, line-aligned.
struct ParallelCorpus {
  std::vector<Sentence> source;
  std::vector<Sentence> target;
};

inline ParallelCorpus load_parallel(const std::string& source_path,
                                    const std::string& target_path) {
  auto read_side = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    std::vector<Sentence> sentences;
    std::string line;
    while (std::getline(in, line)) sentences.push_back(tokenize(line));
    return sentences;
  };
  ParallelCorpus corpus;
  corpus.source = read_side(source_path);
  corpus.target = read_side(target_path);
  if (corpus.source.size() != corpus.target.size()) {
    throw DataError("alignment mismatch " + std::to_string(corpus.source.size()) +
                    "≠" + std::to_string(corpus.target.size()));
  }
  return corpus;
}

inline CorpusStats corpus_stats(const std::vector<AnnotatedPair>& pairs) {
  CorpusStats stats;
  std::set<std::string> uniq_source, uniq_target;
  for (const AnnotatedPair& p : pairs) {
    ++stats.sentence_count;
    stats.word_count_source += static_cast<long long>(p.source.size());
    stats.word_count_target += static_cast<long long>(p.target.size());
    for (const Token& t : p.source) uniq_source.insert(t.surface);
    for (const Token& t : p.target) uniq_target.insert(t.surface);
  }
  stats.unique_words_source = static_cast<long long>(uniq_source.size());
  stats.unique_words_target = static_cast<long long>(uniq_target.size());
  return stats;
}

// Deterministic shuffle split; |test| = round(test_fraction * N).
// Original ordering is preserved within each side.
inline std::pair<std::vector<AnnotatedPair>, std::vector<AnnotatedPair>> split(
    const std::vector<AnnotatedPair>& pairs, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
    throw DataError("test_fraction must be in [0, 1]");
  const std::size_t n = pairs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  const auto test_size =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  std::vector<bool> in_test(n, false);
  for (std::size_t i = 0; i < test_size && i < n; ++i) in_test[order[i]] = true;
  std::vector<AnnotatedPair> train, test;
  for (std::size_t i = 0; i < n; ++i) (in_test[i] ? test : train).push_back(pairs[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace simplegate
