#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "simplegate/classifiers.hpp"
#include "simplegate/common.hpp"
#include "simplegate/engine.hpp"
#include "simplegate/features.hpp"
#include "simplegate/json_util.hpp"
#include "simplegate/text.hpp"

namespace simplegate {

// One routing decision: the simplified sentence goes downstream on Yes,
// the original otherwise.
struct GateDecision {
  std::string original;
  std::string simplified;
  Prediction prediction{Label::No, 0.0};
  std::string routed;
  bool routed_is_simplified = false;
  std::vector<std::string> flags;
  std::optional<std::string> translation;
};

using Predictor = std::function<Prediction(const FeatureVector&)>;

inline Predictor predictor_for(const ClassifierModel& model) {
  return [&model](const FeatureVector& fv) {
    return predict(model, std::span<const double>(fv.values));
  };
}

// Tokenizes both sides, extracts the 17 features and applies the
// classifier. An empty simplification routes the original, flagged.
inline GateDecision decide(const FeatureResources& res, const Predictor& predictor,
                           const std::string& original, const std::string& simplified) {
  GateDecision decision;
  decision.original = original;
  decision.simplified = simplified;
  Sentence source = tokenize(original);
  Sentence target = tokenize(simplified);
  if (target.empty()) {
    decision.routed = original;
    decision.routed_is_simplified = false;
    decision.flags.push_back("engine returned empty");
    return decision;
  }
  FeatureVector fv = extract_features(res, source, target);
  decision.prediction = predictor(fv);
  decision.routed_is_simplified = decision.prediction.label == Label::Yes;
  decision.routed = decision.routed_is_simplified ? simplified : original;
  return decision;
}

struct GateSummary {
  long long total = 0;
  long long routed_simplified = 0;
  long long routed_original = 0;
  long long failures = 0;
};

// Order-preserving pipeline over an input stream of sentences. Any
// single-sentence engine or classifier failure produces a flagged,
// original-routed decision and the stream continues.
inline GateSummary run_pipeline(const FeatureResources& res, const Predictor& predictor,
                                const EngineAdapter& simplifier,
                                const EngineAdapter* translator, std::istream& input,
                                const std::function<void(const GateDecision&)>& emit) {
  GateSummary summary;
  std::string line;
  while (std::getline(input, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    GateDecision decision;
    decision.original = line;
    try {
      decision.simplified = simplifier.simplify(line);
      decision = decide(res, predictor, line, decision.simplified);
    } catch (const std::exception& e) {
      decision.routed = line;
      decision.routed_is_simplified = false;
      decision.prediction = {Label::No, 0.0};
      decision.flags.push_back(std::string("engine error: ") + e.what());
      ++summary.failures;
    }
    if (translator) {
      try {
        decision.translation = translator->simplify(decision.routed);
      } catch (const std::exception& e) {
        decision.flags.push_back(std::string("translation engine error: ") + e.what());
      }
    }
    ++summary.total;
    (decision.routed_is_simplified ? summary.routed_simplified : summary.routed_original) += 1;
    emit(decision);
  }
  return summary;
}

inline nlohmann::json decision_to_json(const GateDecision& d) {
  nlohmann::json j;
  j["original"] = d.original;
  j["simplified"] = d.simplified;
  j["label"] = to_string(d.prediction.label);
  j["score"] = d.prediction.score;
  j["routed"] = d.routed;
  j["routed_is_simplified"] = d.routed_is_simplified;
  if (!d.flags.empty()) j["flags"] = d.flags;
  if (d.translation) j["translation"] = *d.translation;
  return j;
}

inline nlohmann::json summary_to_json(const GateSummary& s) {
  return {{"summary",
           {{"total", s.total},
            {"routed_simplified", s.routed_simplified},
            {"routed_original", s.routed_original},
            {"failures", s.failures}}}};
}

// Pipeline configuration document:
//   {"simplifier": {"kind": "mock", "table": {...}} | {"kind": "command", "cmd": "...", "timeout_s": 30},
//    "translator": {...},              // optional second engine slot
//    "classifier_model": "model.json",
//    "resources": "dir" | {"source_lm": ..., ...},
//    "timeout_s": 30}
struct PipelineConfig {
  EngineAdapter simplifier = EngineAdapter::mock();
  std::optional<EngineAdapter> translator;
  std::string classifier_model;
  ResourcePaths resources;
  double timeout_s = 30.0;
};

namespace detail {

inline EngineAdapter engine_from_json(const nlohmann::json& j, double default_timeout) {
  if (!j.is_object() || !j.contains("kind"))
    throw DataError("engine config must be an object with a \"kind\"");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "mock") {
    std::map<std::string, std::string> table;
    if (j.contains("table")) table = j["table"].get<std::map<std::string, std::string>>();
    return EngineAdapter::mock(std::move(table));
  }
  if (kind == "command") {
    if (!j.contains("cmd")) throw DataError("command engine config requires \"cmd\"");
    double timeout = j.value("timeout_s", default_timeout);
    return EngineAdapter::command(j["cmd"].get<std::string>(), timeout);
  }
  throw DataError("unknown engine kind \"" + kind + "\"");
}

}  // namespace detail

inline PipelineConfig load_pipeline_config(const std::string& path) {
  nlohmann::json j = load_json_file(path);
  if (!j.is_object()) throw DataError("pipeline config must be a JSON object");
  PipelineConfig config;
  config.timeout_s = j.value("timeout_s", 30.0);
  if (!j.contains("simplifier")) throw DataError("pipeline config requires \"simplifier\"");
  config.simplifier = detail::engine_from_json(j["simplifier"], config.timeout_s);
  if (j.contains("translator") && !j["translator"].is_null())
    config.translator = detail::engine_from_json(j["translator"], config.timeout_s);
  if (!j.contains("classifier_model"))
    throw DataError("pipeline config requires \"classifier_model\"");
  config.classifier_model = j["classifier_model"].get<std::string>();
  if (!j.contains("resources")) throw DataError("pipeline config requires \"resources\"");
  if (j["resources"].is_string()) {
    config.resources = ResourcePaths::in_dir(j["resources"].get<std::string>());
  } else if (j["resources"].is_object()) {
    const auto& r = j["resources"];
    config.resources.source_lm = r.at("source_lm").get<std::string>();
    config.resources.target_lm = r.at("target_lm").get<std::string>();
    config.resources.lexical_table = r.at("lexical_table").get<std::string>();
    config.resources.source_stats = r.at("source_stats").get<std::string>();
    config.resources.target_stats = r.at("target_stats").get<std::string>();
  } else {
    throw DataError("pipeline config \"resources\" must be a directory or path map");
  }
  return config;
}

}  // namespace simplegate
