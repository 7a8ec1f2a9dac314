#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "simplegate/common.hpp"
#include "simplegate/corpus.hpp"
#include "simplegate/json_util.hpp"
#include "simplegate/text.hpp"

namespace simplegate {

// Word-based lexical translation table: prob[s][t] = p(t | s),
// trained with IBM Model 1 EM (no NULL source word).
struct LexicalTable {
  std::map<std::string, std::map<std::string, double>> prob;
  int iterations_run = 0;
};

// Uniform initialization over each source token's co-occurring target
// vocabulary, then `iterations` rounds of EM. Pairs with an empty side
// are skipped. Iteration order is over sorted token keys, so training
// is deterministic.
inline LexicalTable train_model1(const ParallelCorpus& corpus, int iterations) {
  if (corpus.source.empty()) throw DataError("empty lexicon training corpus");
  if (iterations < 0) throw DataError("iterations must be >= 0");

  LexicalTable table;
  bool any = false;
  for (std::size_t k = 0; k < corpus.source.size(); ++k) {
    if (corpus.source[k].empty() || corpus.target[k].empty()) continue;
    any = true;
    for (const Token& s : corpus.source[k])
      for (const Token& t : corpus.target[k]) table.prob[s.surface][t.surface] = 0.0;
  }
  if (!any) throw DataError("empty lexicon training corpus");
  for (auto& [s, row] : table.prob) {
    double uniform = 1.0 / static_cast<double>(row.size());
    for (auto& [t, p] : row) p = uniform;
  }

  for (int iter = 0; iter < iterations; ++iter) {
    std::map<std::string, std::map<std::string, double>> counts;
    for (std::size_t k = 0; k < corpus.source.size(); ++k) {
      const Sentence& src = corpus.source[k];
      const Sentence& tgt = corpus.target[k];
      if (src.empty() || tgt.empty()) continue;
      for (const Token& t : tgt) {
        double denom = 0.0;
        for (const Token& s : src) denom += table.prob.at(s.surface).at(t.surface);
        if (denom <= 0.0) continue;
        for (const Token& s : src)
          counts[s.surface][t.surface] += table.prob.at(s.surface).at(t.surface) / denom;
      }
    }
    for (auto& [s, row] : table.prob) {
      auto cit = counts.find(s);
      if (cit == counts.end()) continue;
      double total = 0.0;
      for (const auto& [t, c] : cit->second) total += c;
      if (total <= 0.0) continue;
      for (auto& [t, p] : row) {
        auto tc = cit->second.find(t);
        p = tc == cit->second.end() ? 0.0 : tc->second / total;
      }
    }
    ++table.iterations_run;
  }
  return table;
}

// Model 1 corpus log-likelihood with a uniform alignment prior,
// sum over target tokens of log( (1/|src|) * sum_s p(t|s) ).
inline double log_likelihood(const LexicalTable& table, const ParallelCorpus& corpus) {
  double ll = 0.0;
  for (std::size_t k = 0; k < corpus.source.size(); ++k) {
    const Sentence& src = corpus.source[k];
    const Sentence& tgt = corpus.target[k];
    if (src.empty() || tgt.empty()) continue;
    for (const Token& t : tgt) {
      double p = 0.0;
      for (const Token& s : src) {
        auto sit = table.prob.find(s.surface);
        if (sit == table.prob.end()) continue;
        auto tit = sit->second.find(t.surface);
        if (tit != sit->second.end()) p += tit->second;
      }
      p /= static_cast<double>(src.size());
      ll += std::log(p > 0.0 ? p : 1e-300);
    }
  }
  return ll;
}

// Number of target tokens with p(t|s) >= tau; unknown source tokens have none.
inline int translations_above(const LexicalTable& table, std::string_view source_token,
                              double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw DataError("tau must be in (0, 1]");
  auto it = table.prob.find(std::string(source_token));
  if (it == table.prob.end()) return 0;
  int count = 0;
  for (const auto& [t, p] : it->second)
    if (p >= tau) ++count;
  return count;
}

// Unweighted mean of translations_above over all sentence tokens.
inline double avg_translations_feature(const LexicalTable& table, const Sentence& sentence,
                                       double tau) {
  if (sentence.empty()) throw DataError("cannot score empty sentence");
  long long sum = 0;
  for (const Token& t : sentence) sum += translations_above(table, t.surface, tau);
  return static_cast<double>(sum) / static_cast<double>(sentence.size());
}

inline nlohmann::json lexicon_to_json(const LexicalTable& table) {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  j["kind"] = "lexical_table";
  j["iterations"] = table.iterations_run;
  j["prob"] = table.prob;
  return j;
}

inline LexicalTable lexicon_from_json(const nlohmann::json& j) {
  detail::check_header(j, "lexical_table");
  LexicalTable table;
  table.iterations_run = j.at("iterations").get<int>();
  table.prob = j.at("prob").get<std::map<std::string, std::map<std::string, double>>>();
  return table;
}

}  // namespace simplegate
