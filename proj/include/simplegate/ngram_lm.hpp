#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "simplegate/common.hpp"
#include "simplegate/json_util.hpp"
#include "simplegate/text.hpp"

namespace simplegate {

inline constexpr std::string_view kBeginMarker = "<s>";
inline constexpr std::string_view kEndMarker = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

// Add-one smoothed trigram model. The vocabulary holds every training
// token plus </s> and <unk>; <s> is context-only and never predicted.
struct TrigramLM {
  std::set<std::string> vocabulary;
  std::map<std::string, long long> unigram_counts;
  std::map<std::string, long long> bigram_counts;  // trigram contexts
  std::map<std::string, long long> trigram_counts;

  std::size_t vocab_size() const { return vocabulary.size(); }
};

namespace detail {

inline std::string key2(std::string_view a, std::string_view b) {
  std::string k;
  k.reserve(a.size() + b.size() + 1);
  k.append(a);
  k.push_back(' ');
  k.append(b);
  return k;
}

inline std::string key3(std::string_view a, std::string_view b, std::string_view c) {
  std::string k = key2(a, b);
  k.push_back(' ');
  k.append(c);
  return k;
}

}  // namespace detail

inline TrigramLM train_lm(const std::vector<Sentence>& sentences) {
  TrigramLM lm;
  lm.vocabulary.insert(std::string(kEndMarker));
  lm.vocabulary.insert(std::string(kUnknown));
  bool any = false;
  for (const Sentence& sentence : sentences) {
    if (sentence.empty()) continue;
    any = true;
    std::vector<std::string> padded;
    padded.reserve(sentence.size() + 3);
    padded.emplace_back(kBeginMarker);
    padded.emplace_back(kBeginMarker);
    for (const Token& t : sentence) {
      padded.push_back(t.surface);
      lm.vocabulary.insert(t.surface);
      ++lm.unigram_counts[t.surface];
    }
    padded.emplace_back(kEndMarker);
    ++lm.unigram_counts[std::string(kEndMarker)];
    // Bigrams are counted as trigram contexts only, so that counts for a
    // context always sum to the trigram mass it carries.
    for (std::size_t i = 0; i + 2 < padded.size(); ++i) {
      ++lm.bigram_counts[detail::key2(padded[i], padded[i + 1])];
      ++lm.trigram_counts[detail::key3(padded[i], padded[i + 1], padded[i + 2])];
    }
  }
  if (!any) throw DataError("empty LM training corpus");
  return lm;
}

namespace detail {

inline std::string_view map_context_token(const TrigramLM& lm, std::string_view token) {
  if (token == kBeginMarker) return token;
  if (lm.vocabulary.count(std::string(token))) return token;
  return kUnknown;
}

}  // namespace detail

// (count(c1 c2 w) + 1) / (count(c1 c2) + V); OOV query tokens map to <unk>.
inline double trigram_prob(const TrigramLM& lm, std::string_view c1, std::string_view c2,
                           std::string_view word) {
  std::string_view m1 = detail::map_context_token(lm, c1);
  std::string_view m2 = detail::map_context_token(lm, c2);
  std::string_view w = lm.vocabulary.count(std::string(word)) ? word : kUnknown;
  long long tri = 0, ctx = 0;
  if (auto it = lm.trigram_counts.find(detail::key3(m1, m2, w)); it != lm.trigram_counts.end())
    tri = it->second;
  if (auto it = lm.bigram_counts.find(detail::key2(m1, m2)); it != lm.bigram_counts.end())
    ctx = it->second;
  return (static_cast<double>(tri) + 1.0) /
         (static_cast<double>(ctx) + static_cast<double>(lm.vocab_size()));
}

// Mean base-10 log trigram probability over the padded sentence.
// A sentence of n tokens contributes n + 1 trigrams.
inline double lm_feature(const TrigramLM& lm, const Sentence& sentence) {
  if (sentence.empty()) throw DataError("cannot score empty sentence");
  std::vector<std::string> padded;
  padded.reserve(sentence.size() + 3);
  padded.emplace_back(kBeginMarker);
  padded.emplace_back(kBeginMarker);
  for (const Token& t : sentence) padded.push_back(t.surface);
  padded.emplace_back(kEndMarker);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + 2 < padded.size(); ++i) {
    sum += std::log10(trigram_prob(lm, padded[i], padded[i + 1], padded[i + 2]));
    ++count;
  }
  return sum / static_cast<double>(count);
}

inline nlohmann::json lm_to_json(const TrigramLM& lm) {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  j["kind"] = "trigram_lm";
  j["vocab"] = lm.vocabulary;
  j["unigrams"] = lm.unigram_counts;
  j["bigrams"] = lm.bigram_counts;
  j["trigrams"] = lm.trigram_counts;
  return j;
}

inline TrigramLM lm_from_json(const nlohmann::json& j) {
  detail::check_header(j, "trigram_lm");
  TrigramLM lm;
  for (const auto& v : j.at("vocab")) lm.vocabulary.insert(v.get<std::string>());
  lm.unigram_counts = j.at("unigrams").get<std::map<std::string, long long>>();
  lm.bigram_counts = j.at("bigrams").get<std::map<std::string, long long>>();
  lm.trigram_counts = j.at("trigrams").get<std::map<std::string, long long>>();
  if (lm.vocab_size() < 2) throw DataError("trigram_lm vocabulary too small");
  return lm;
}

}  // namespace simplegate
