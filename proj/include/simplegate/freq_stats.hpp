#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "simplegate/common.hpp"
#include "simplegate/json_util.hpp"
#include "simplegate/text.hpp"

namespace simplegate {

enum class Side { Source, Target };

inline const char* to_string(Side side) {
  return side == Side::Source ? "source" : "target";
}

// Unigram/bigram/trigram corpus counts (no padding, no cross-sentence
// n-grams) with nearest-rank Q1/Q3 thresholds over the distinct-count
// multiset. An empty n-gram distribution leaves q1 = q3 = 0, flagged.
struct FrequencyStats {
  Side side = Side::Source;
  std::array<std::map<std::string, long long>, 3> counts;  // index n-1
  std::array<long long, 3> q1{0, 0, 0};
  std::array<long long, 3> q3{0, 0, 0};
  std::array<bool, 3> degenerate{false, false, false};

  long long count_of(const std::string& key, int n) const {
    const auto& m = counts[static_cast<std::size_t>(n - 1)];
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
  }
};

namespace detail {

inline long long nearest_rank(const std::vector<long long>& sorted, double q) {
  // 1-indexed rank ceil(q * m) into the sorted multiset.
  auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(sorted.size())));
  if (rank < 1) rank = 1;
  return sorted[rank - 1];
}

inline std::string ngram_key(const Sentence& sentence, std::size_t start, int n) {
  std::string key = sentence[start].surface;
  for (int i = 1; i < n; ++i) {
    key.push_back(' ');
    key += sentence[start + static_cast<std::size_t>(i)].surface;
  }
  return key;
}

}  // namespace detail

inline FrequencyStats build_freq_stats(const std::vector<Sentence>& corpus, Side side) {
  if (corpus.empty()) throw DataError("empty frequency-stats corpus");
  FrequencyStats stats;
  stats.side = side;
  for (const Sentence& sentence : corpus) {
    for (int n = 1; n <= 3; ++n) {
      if (sentence.size() < static_cast<std::size_t>(n)) continue;
      auto& m = stats.counts[static_cast<std::size_t>(n - 1)];
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= sentence.size(); ++i)
        ++m[detail::ngram_key(sentence, i, n)];
    }
  }
  for (int n = 1; n <= 3; ++n) {
    const auto& m = stats.counts[static_cast<std::size_t>(n - 1)];
    if (m.empty()) {
      stats.degenerate[static_cast<std::size_t>(n - 1)] = true;
      continue;
    }
    std::vector<long long> distinct;
    distinct.reserve(m.size());
    for (const auto& [k, c] : m) distinct.push_back(c);
    std::sort(distinct.begin(), distinct.end());
    stats.q1[static_cast<std::size_t>(n - 1)] = detail::nearest_rank(distinct, 0.25);
    stats.q3[static_cast<std::size_t>(n - 1)] = detail::nearest_rank(distinct, 0.75);
  }
  return stats;
}

struct PctResult {
  double value = 0.0;
  bool degenerate = false;  // sentence shorter than n
};

namespace detail {

template <typename Pred>
inline PctResult ngram_pct(const FrequencyStats& stats, const Sentence& sentence, int n,
                           Pred pred) {
  if (n < 1 || n > 3) throw DataError("n must be 1, 2 or 3");
  if (sentence.empty()) throw DataError("cannot score empty sentence");
  if (sentence.size() < static_cast<std::size_t>(n)) return {0.0, true};
  long long matched = 0, total = 0;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= sentence.size(); ++i) {
    long long count = stats.count_of(ngram_key(sentence, i, n), n);
    if (pred(count)) ++matched;
    ++total;
  }
  return {100.0 * static_cast<double>(matched) / static_cast<double>(total), false};
}

}  // namespace detail

// Percentage of sentence n-grams with corpus count <= Q1. Unseen n-grams
// have count 0 and therefore always count as low-frequency.
inline PctResult low_freq_pct(const FrequencyStats& stats, const Sentence& sentence, int n) {
  long long q1 = stats.q1[static_cast<std::size_t>(n - 1)];
  return detail::ngram_pct(stats, sentence, n, [q1](long long c) { return c <= q1; });
}

// Percentage of sentence n-grams with corpus count >= Q3. Unseen n-grams
// are never high-frequency.
inline PctResult high_freq_pct(const FrequencyStats& stats, const Sentence& sentence, int n) {
  long long q3 = stats.q3[static_cast<std::size_t>(n - 1)];
  return detail::ngram_pct(stats, sentence, n,
                           [q3](long long c) { return c >= 1 && c >= q3; });
}

// Percentage of sentence tokens present in the stats corpus.
inline double words_in_corpus_pct(const FrequencyStats& stats, const Sentence& sentence) {
  if (sentence.empty()) throw DataError("cannot score empty sentence");
  long long present = 0;
  for (const Token& t : sentence)
    if (stats.count_of(t.surface, 1) >= 1) ++present;
  return 100.0 * static_cast<double>(present) / static_cast<double>(sentence.size());
}

// Fraction in [0, 1] of target tokens present in the target training corpus.
inline double target_presence_feature(const FrequencyStats& target_stats,
                                      const Sentence& sentence) {
  if (sentence.empty()) throw DataError("cannot score empty sentence");
  long long present = 0;
  for (const Token& t : sentence)
    if (target_stats.count_of(t.surface, 1) >= 1) ++present;
  return static_cast<double>(present) / static_cast<double>(sentence.size());
}

inline nlohmann::json freq_stats_to_json(const FrequencyStats& stats) {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  j["kind"] = "freq_stats";
  j["side"] = to_string(stats.side);
  j["unigrams"] = stats.counts[0];
  j["bigrams"] = stats.counts[1];
  j["trigrams"] = stats.counts[2];
  j["q1"] = stats.q1;
  j["q3"] = stats.q3;
  j["degenerate"] = stats.degenerate;
  return j;
}

inline FrequencyStats freq_stats_from_json(const nlohmann::json& j) {
  detail::check_header(j, "freq_stats");
  FrequencyStats stats;
  std::string side = j.at("side").get<std::string>();
  if (side == "source")
    stats.side = Side::Source;
  else if (side == "target")
    stats.side = Side::Target;
  else
    throw DataError("unknown freq_stats side \"" + side + "\"");
  stats.counts[0] = j.at("unigrams").get<std::map<std::string, long long>>();
  stats.counts[1] = j.at("bigrams").get<std::map<std::string, long long>>();
  stats.counts[2] = j.at("trigrams").get<std::map<std::string, long long>>();
  for (std::size_t i = 0; i < 3; ++i) {
    stats.q1[i] = j.at("q1").at(i).get<long long>();
    stats.q3[i] = j.at("q3").at(i).get<long long>();
    stats.degenerate[i] = j.at("degenerate").at(i).get<bool>();
  }
  return stats;
}

}  // namespace simplegate
